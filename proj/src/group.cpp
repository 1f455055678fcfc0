#include "hyperlab/group.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "hyperlab/errors.hpp"

namespace hyperlab {

namespace {

std::atomic<std::uint64_t> next_group_id{1};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> letters(int count) {
  if (count < 1 || count > 26) throw InputError("generator count must be in [1, 26]");
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  return out;
}

int parse_positive(std::string_view text, std::string_view what) {
  int value = 0;
  if (text.empty()) throw InputError(std::string(what) + ": missing number");
  for (char ch : text) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw InputError(std::string(what) + ": not a number: " + std::string(text));
    }
    value = value * 10 + (ch - '0');
    if (value > 1000) throw InputError(std::string(what) + ": value too large");
  }
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> names, std::vector<Symbol> inverse)
    : names_(std::move(names)), inverse_(std::move(inverse)) {
  if (names_.size() != inverse_.size()) throw InputError("alphabet: names/inverse size mismatch");
  if (names_.size() > 255) throw InputError("alphabet: too many symbols");
  generator_.assign(names_.size(), 0);
  sign_.assign(names_.size(), 0);
  for (std::size_t s = 0; s < names_.size(); ++s) {
    const Symbol inv = inverse_[s];
    if (inv >= names_.size() || inverse_[inv] != s) {
      throw InputError("alphabet: inverse map is not an involution at " + names_[s]);
    }
    if (sign_[s] != 0) continue;
    generator_[s] = generator_count_;
    sign_[s] = 1;
    if (inv != s) {
      generator_[inv] = generator_count_;
      sign_[inv] = -1;
    }
    ++generator_count_;
  }
}

Alphabet Alphabet::from_generators(const std::vector<std::string>& generators,
                                   const std::vector<bool>& involutions) {
  std::vector<std::string> names;
  std::vector<Symbol> inverse;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const bool self_inverse = i < involutions.size() && involutions[i];
    const auto s = static_cast<Symbol>(names.size());
    names.push_back(generators[i]);
    if (self_inverse) {
      inverse.push_back(s);
    } else {
      names.push_back(generators[i] + "'");
      inverse.push_back(static_cast<Symbol>(s + 1));
      inverse.push_back(s);
    }
  }
  return Alphabet(std::move(names), std::move(inverse));
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
  for (std::size_t s = 0; s < names_.size(); ++s) {
    if (names_[s] == name) return static_cast<Symbol>(s);
  }
  return std::nullopt;
}

Word Alphabet::parse(std::string_view text) const {
  Word out;
  std::istringstream tokens{std::string(trim(text))};
  std::string token;
  while (tokens >> token) {
    if (token == "1") continue;
    std::size_t pos = 0;
    while (pos < token.size()) {
      // Greedy longest match so that "a'" wins over "a".
      std::optional<Symbol> best;
      std::size_t best_len = 0;
      for (std::size_t s = 0; s < names_.size(); ++s) {
        const auto& n = names_[s];
        if (n.size() > best_len && token.compare(pos, n.size(), n) == 0) {
          best = static_cast<Symbol>(s);
          best_len = n.size();
        }
      }
      if (!best) throw InputError("unknown symbol in word '" + token + "' at offset " + std::to_string(pos));
      out.push_back(*best);
      pos += best_len;
    }
  }
  return out;
}

std::string Alphabet::format(std::span<const Symbol> word) const {
  if (word.empty()) return "1";
  std::string out;
  for (Symbol s : word) out += name(s);
  return out;
}

std::string to_string(PresentationKind kind) {
  switch (kind) {
    case PresentationKind::free: return "free";
    case PresentationKind::free_product_of_cyclics: return "free-product-of-cyclics";
    case PresentationKind::small_cancellation: return "small-cancellation";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Word utilities

Word free_reduce(const Alphabet& alphabet, std::span<const Symbol> word) {
  Word out;
  out.reserve(word.size());
  for (Symbol s : word) {
    if (!out.empty() && out.back() == alphabet.inverse(s)) {
      out.pop_back();
    } else {
      out.push_back(s);
    }
  }
  return out;
}

Word inverse_word(const Alphabet& alphabet, std::span<const Symbol> word) {
  Word out(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) out[word.size() - 1 - i] = alphabet.inverse(word[i]);
  return out;
}

bool shortlex_less(std::span<const Symbol> a, std::span<const Symbol> b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

Word cyclic_reduce_word(const Alphabet& alphabet, Word w) {
  w = free_reduce(alphabet, w);
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == alphabet.inverse(w[hi - 1])) {
    ++lo;
    --hi;
  }
  return Word(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
}

std::vector<Word> symmetrized_relators(const Alphabet& alphabet, const std::vector<Word>& relators) {
  std::set<Word> unique;
  for (const Word& r : relators) {
    for (const Word& base : {r, inverse_word(alphabet, r)}) {
      for (std::size_t shift = 0; shift < base.size(); ++shift) {
        Word rotated(base.begin() + static_cast<std::ptrdiff_t>(shift), base.end());
        rotated.insert(rotated.end(), base.begin(), base.begin() + static_cast<std::ptrdiff_t>(shift));
        unique.insert(std::move(rotated));
      }
    }
  }
  return {unique.begin(), unique.end()};
}

/// Exponent of `word` if it is a proper power g^n (n >= 2) of one symbol.
std::optional<std::pair<std::size_t, int>> single_generator_power(const Alphabet& alphabet, const Word& word) {
  if (word.size() < 2) return std::nullopt;
  for (Symbol s : word) {
    if (s != word.front()) return std::nullopt;
  }
  return std::make_pair(alphabet.generator_of(word.front()), static_cast<int>(word.size()));
}

}  // namespace

std::size_t max_piece_length(const Alphabet& alphabet, const std::vector<Word>& relators) {
  const auto conjugates = symmetrized_relators(alphabet, relators);
  std::size_t best = 0;
  for (std::size_t i = 0; i < conjugates.size(); ++i) {
    for (std::size_t j = i + 1; j < conjugates.size(); ++j) {
      const auto& a = conjugates[i];
      const auto& b = conjugates[j];
      std::size_t k = 0;
      while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
      best = std::max(best, k);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Group

Group::Group(GroupPresentation presentation) : impl_(std::make_shared<Impl>()) {
  impl_->id = next_group_id++;
  auto& pres = presentation;
  const auto& alphabet = pres.alphabet;
  if (alphabet.generator_count() == 0) throw InputError("presentation has no generators");

  switch (pres.kind) {
    case PresentationKind::free:
      if (!pres.relators.empty()) throw InputError("free presentation must not carry relators");
      pres.orders.assign(alphabet.generator_count(), 0);
      if (alphabet.generator_count() < 2) throw InputError("free group must have rank >= 2 (non-elementary)");
      for (std::size_t s = 0; s < alphabet.size(); ++s) {
        if (alphabet.is_involution(static_cast<Symbol>(s))) throw InputError("free presentation with an involution symbol");
      }
      break;
    case PresentationKind::free_product_of_cyclics: {
      if (pres.orders.size() != alphabet.generator_count()) {
        throw InputError("free-product presentation needs one order per generator");
      }
      int finite_two = 0;
      for (std::size_t s = 0; s < alphabet.size(); ++s) {
        const auto gen = alphabet.generator_of(static_cast<Symbol>(s));
        const bool two = pres.orders[gen] == 2;
        if (two != alphabet.is_involution(static_cast<Symbol>(s))) {
          throw InputError("order-2 generators must be exactly the self-inverse symbols");
        }
      }
      for (int order : pres.orders) {
        if (order == 1 || order < 0) throw InputError("cyclic factor order must be 0 (infinite) or >= 2");
        if (order == 2) ++finite_two;
      }
      const auto factors = pres.orders.size();
      if (factors < 2 || (factors == 2 && finite_two == 2)) {
        throw InputError("free product of cyclics is elementary");
      }
      break;
    }
    case PresentationKind::small_cancellation: {
      if (pres.relators.empty()) throw InputError("small-cancellation presentation needs relators");
      for (auto& r : pres.relators) {
        r = cyclic_reduce_word(alphabet, r);
        if (r.empty()) throw InputError("relator reduces to the empty word");
      }
      std::size_t shortest = pres.relators.front().size();
      for (const auto& r : pres.relators) shortest = std::min(shortest, r.size());
      const std::size_t piece = max_piece_length(alphabet, pres.relators);
      if (6 * piece >= shortest) {
        throw InputError("presentation is not C'(1/6): piece of length " + std::to_string(piece) +
                         " against shortest relator " + std::to_string(shortest));
      }
      impl_->relator_conjugates = symmetrized_relators(alphabet, pres.relators);
      break;
    }
  }
  impl_->presentation = std::move(pres);
}

Group Group::free(int rank) {
  GroupPresentation pres;
  pres.alphabet = Alphabet::from_generators(letters(rank));
  pres.kind = PresentationKind::free;
  Group g(std::move(pres));
  g.impl_->spec = "free:" + std::to_string(rank);
  return g;
}

Group Group::surface(int genus) {
  if (genus < 2) throw InputError("surface genus must be >= 2");
  GroupPresentation pres;
  pres.alphabet = Alphabet::from_generators(letters(2 * genus));
  Word relator;
  for (int i = 0; i < genus; ++i) {
    const auto x = static_cast<Symbol>(4 * i);
    const auto y = static_cast<Symbol>(4 * i + 2);
    for (Symbol s : {x, y, static_cast<Symbol>(x + 1), static_cast<Symbol>(y + 1)}) relator.push_back(s);
  }
  pres.relators.push_back(relator);
  pres.kind = PresentationKind::small_cancellation;
  Group g(std::move(pres));
  g.impl_->spec = "surface:" + std::to_string(genus);
  return g;
}

Group Group::modular() {
  GroupPresentation pres;
  pres.alphabet = Alphabet::from_generators({"a", "b"}, {true, false});
  pres.kind = PresentationKind::free_product_of_cyclics;
  pres.orders = {2, 3};
  pres.relators = {Word{0, 0}, Word{1, 1, 1}};
  Group g(std::move(pres));
  g.impl_->spec = "modular";
  return g;
}

Group Group::from_spec(std::string_view spec) {
  spec = trim(spec);
  if (spec == "modular") return modular();
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InputError("group spec must look like free:k, surface:g, modular or file:path");
  const auto head = spec.substr(0, colon);
  const auto tail = spec.substr(colon + 1);
  if (head == "free") return free(parse_positive(tail, "free rank"));
  if (head == "surface") return surface(parse_positive(tail, "surface genus"));
  if (head == "file") {
    std::ifstream in{std::string(tail)};
    if (!in) throw InputError("cannot open presentation file " + std::string(tail));
    std::stringstream buffer;
    buffer << in.rdbuf();
    Group g = from_text(buffer.str());
    g.impl_->spec = std::string(spec);
    return g;
  }
  throw InputError("unknown group kind '" + std::string(head) + "'");
}

Group Group::from_text(std::string_view text) {
  std::vector<std::string> generators;
  std::vector<std::string> relator_lines;
  std::istringstream lines{std::string(text)};
  std::string line;
  bool have_generators = false;
  while (std::getline(lines, line)) {
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (view.starts_with("generators:")) {
      if (have_generators) throw InputError("duplicate generators line");
      have_generators = true;
      std::istringstream names{std::string(view.substr(11))};
      std::string name;
      while (names >> name) {
        if (name.find('\'') != std::string::npos) throw InputError("generator names must not contain apostrophes");
        generators.push_back(name);
      }
    } else {
      if (!have_generators) throw InputError("relator before generators line");
      relator_lines.emplace_back(view);
    }
  }
  if (!have_generators || generators.empty()) throw InputError("missing generators line");

  const Alphabet plain = Alphabet::from_generators(generators);
  std::vector<Word> relators;
  for (const auto& r : relator_lines) relators.push_back(plain.parse(r));

  GroupPresentation pres;
  if (relators.empty()) {
    pres.alphabet = plain;
    pres.kind = PresentationKind::free;
    Group g(std::move(pres));
    g.impl_->spec = "text";
    return g;
  }

  // Proper powers of single generators only: a free product of cyclic groups.
  std::vector<int> orders(generators.size(), 0);
  bool all_powers = true;
  for (const auto& r : relators) {
    const auto reduced = cyclic_reduce_word(plain, r);
    const auto power = single_generator_power(plain, reduced);
    if (!power) {
      all_powers = false;
      break;
    }
    auto& order = orders[power->first];
    order = order == 0 ? power->second : std::gcd(order, power->second);
  }
  if (all_powers) {
    std::vector<bool> involutions;
    std::vector<Word> rebuilt;
    for (int order : orders) involutions.push_back(order == 2);
    pres.alphabet = Alphabet::from_generators(generators, involutions);
    for (std::size_t gen = 0; gen < orders.size(); ++gen) {
      if (orders[gen] == 0) continue;
      if (orders[gen] == 1) throw InputError("relator kills generator " + generators[gen]);
      const auto positive = *pres.alphabet.find(generators[gen]);
      rebuilt.emplace_back(static_cast<std::size_t>(orders[gen]), positive);
    }
    pres.relators = std::move(rebuilt);
    pres.orders = orders;
    pres.kind = PresentationKind::free_product_of_cyclics;
  } else {
    pres.alphabet = plain;
    pres.relators = std::move(relators);
    pres.kind = PresentationKind::small_cancellation;
  }
  Group g(std::move(pres));
  g.impl_->spec = "text";
  return g;
}

int Group::free_rank() const {
  return kind() == PresentationKind::free ? static_cast<int>(alphabet().generator_count()) : 0;
}

void Group::check_membership(const GroupElement& g) const {
  if (g.group_id != id()) throw InputError("element belongs to a different group");
}

Word Group::reduce(std::span<const Symbol> word) const {
  const auto& pres = presentation();
  const auto& alpha = pres.alphabet;
  for (Symbol s : word) {
    if (s >= alpha.size()) throw InputError("symbol out of range for alphabet");
  }
  if (kind() == PresentationKind::small_cancellation) return dehn_reduce(free_reduce(alpha, word));

  // Syllable normal form: each maximal run of one generator is replaced by the
  // shortest representative of its exponent in the cyclic factor.
  Word out;
  out.reserve(word.size());
  for (Symbol s : word) {
    const auto gen = alpha.generator_of(s);
    const int order = pres.orders[gen];
    if (order == 0) {
      if (!out.empty() && out.back() == alpha.inverse(s)) {
        out.pop_back();
      } else {
        out.push_back(s);
      }
      continue;
    }
    int exponent = alpha.exponent_sign(s);
    Symbol positive = s;
    while (!out.empty() && alpha.generator_of(out.back()) == gen) {
      exponent += alpha.exponent_sign(out.back());
      out.pop_back();
    }
    if (alpha.exponent_sign(s) < 0) positive = alpha.inverse(s);
    exponent = ((exponent % order) + order) % order;
    if (2 * exponent > order) exponent -= order;
    const Symbol emit = exponent > 0 ? positive : alpha.inverse(positive);
    for (int i = 0; i < std::abs(exponent); ++i) out.push_back(emit);
  }
  return out;
}

Word Group::dehn_reduce(Word word) const {
  const auto& alpha = alphabet();
  const auto& conjugates = impl_->relator_conjugates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < word.size() && !changed; ++i) {
      for (const Word& r : conjugates) {
        if (r.front() != word[i]) continue;
        std::size_t m = 0;
        while (m < r.size() && i + m < word.size() && word[i + m] == r[m]) ++m;
        if (2 * m <= r.size()) continue;
        // r = u v with |u| = m > |r|/2, so u = v^-1 is strictly shorter.
        const Word replacement =
            inverse_word(alpha, std::span<const Symbol>(r).subspan(m));
        Word next(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(i));
        next.insert(next.end(), replacement.begin(), replacement.end());
        next.insert(next.end(), word.begin() + static_cast<std::ptrdiff_t>(i + m), word.end());
        word = free_reduce(alpha, next);
        changed = true;
        break;
      }
    }
  }
  return word;
}

GroupElement Group::normalize(std::span<const Symbol> word) const { return GroupElement{reduce(word), id()}; }

GroupElement Group::element(std::string_view text) const { return normalize(alphabet().parse(text)); }

GroupElement Group::generator(Symbol s) const {
  const Word w{s};
  return normalize(w);
}

GroupElement Group::multiply(const GroupElement& g, const GroupElement& h) const {
  check_membership(g);
  check_membership(h);
  Word joined = g.word;
  joined.insert(joined.end(), h.word.begin(), h.word.end());
  return normalize(joined);
}

GroupElement Group::invert(const GroupElement& g) const {
  check_membership(g);
  return normalize(inverse_word(alphabet(), g.word));
}

bool Group::is_trivial(const GroupElement& g) const {
  check_membership(g);
  return reduce(g.word).empty();
}

bool Group::equal(const GroupElement& g, const GroupElement& h) const {
  check_membership(g);
  check_membership(h);
  if (has_unique_normal_forms()) return g.word == h.word;
  if (g.word == h.word) return true;
  return is_trivial(multiply(g, invert(h)));
}

CyclicDecomposition Group::cyclically_reduce(const GroupElement& g) const {
  check_membership(g);
  if (is_trivial(g)) throw InputError("cyclically_reduce: identity has no core");
  const auto& alpha = alphabet();
  const auto& pres = presentation();
  Word conjugator;
  Word core = g.word;

  const auto finite_generator = [&](Symbol s) { return pres.orders.size() > 0 && pres.orders[alpha.generator_of(s)] != 0; };
  if (kind() == PresentationKind::free_product_of_cyclics) {
    // Conjugate by the first syllable while the first and last syllables lie in
    // the same factor; each round removes one syllable.
    while (core.size() >= 2) {
      const auto gen = alpha.generator_of(core.front());
      if (alpha.generator_of(core.back()) != gen) break;
      std::size_t run = 0;
      while (run < core.size() && alpha.generator_of(core[run]) == gen) ++run;
      if (run == core.size()) break;  // single syllable
      if (!finite_generator(core.front()) && core.front() != alpha.inverse(core.back())) break;
      const Word syllable(core.begin(), core.begin() + static_cast<std::ptrdiff_t>(run));
      Word conjugated = inverse_word(alpha, syllable);
      conjugated.insert(conjugated.end(), core.begin(), core.end());
      conjugated.insert(conjugated.end(), syllable.begin(), syllable.end());
      core = reduce(conjugated);
      conjugator.insert(conjugator.end(), syllable.begin(), syllable.end());
    }
  } else {
    std::size_t lo = 0;
    std::size_t hi = core.size();
    while (hi - lo >= 2 && core[lo] == alpha.inverse(core[hi - 1])) {
      ++lo;
      --hi;
    }
    conjugator.assign(core.begin(), core.begin() + static_cast<std::ptrdiff_t>(lo));
    core = Word(core.begin() + static_cast<std::ptrdiff_t>(lo), core.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return {normalize(conjugator), normalize(core)};
}

bool Group::is_torsion(const GroupElement& g) const {
  check_membership(g);
  if (kind() != PresentationKind::free_product_of_cyclics || g.empty()) return false;
  const auto core = cyclically_reduce(g).core.word;
  const auto& alpha = alphabet();
  const auto gen = alpha.generator_of(core.front());
  for (Symbol s : core) {
    if (alpha.generator_of(s) != gen) return false;
  }
  return presentation().orders[gen] != 0;
}

std::string Group::format(const GroupElement& g) const { return alphabet().format(g.word); }

}  // namespace hyperlab
