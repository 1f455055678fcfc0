#include "hyperlab/ball.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "hyperlab/errors.hpp"

namespace hyperlab {

namespace {

using Perm = std::vector<std::uint8_t>;

Perm invert_perm(const Perm& p) {
  Perm out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<std::uint8_t>(i);
  return out;
}

bool is_identity(const Perm& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != i) return false;
  }
  return true;
}

/// Right action: the image of point q under `word` is images[s_k](...images[s_1](q)).
bool kills(const std::vector<Perm>& images, const Word& word, std::size_t degree) {
  for (std::size_t q = 0; q < degree; ++q) {
    std::uint8_t point = static_cast<std::uint8_t>(q);
    for (Symbol s : word) point = images[s][point];
    if (point != q) return false;
  }
  return true;
}

Perm random_involution(std::size_t degree, std::mt19937_64& rng) {
  Perm order(degree);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = 0; i + 1 < degree; i += 2) {
    if (rng() & 1U) std::swap(p[order[i]], p[order[i + 1]]);
  }
  return p;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// ElementSignature

ElementSignature::ElementSignature(const Group& group) : alphabet_(&group.alphabet()), group_(group) {
  if (group.has_unique_normal_forms()) return;
  by_word_ = false;
  const auto& alpha = group.alphabet();
  const auto& relators = group.presentation().relators;

  // Exponent sums are invariants when every relator is balanced.
  abelian_ = true;
  for (const auto& r : relators) {
    std::vector<int> sums(alpha.generator_count(), 0);
    for (Symbol s : r) sums[alpha.generator_of(s)] += alpha.exponent_sign(s);
    if (std::any_of(sums.begin(), sums.end(), [](int v) { return v != 0; })) abelian_ = false;
  }

  // Random permutation representations found by rejection sampling; the seed
  // is fixed so the index layout is reproducible.
  std::mt19937_64 rng(0x5eed1234ULL);
  std::size_t offset = 0;
  for (std::size_t degree : {6U, 7U, 8U}) {
    for (int attempt = 0; attempt < 400'000; ++attempt) {
      std::vector<Perm> images(alpha.size());
      bool nontrivial = false;
      for (std::size_t s = 0; s < alpha.size(); ++s) {
        const auto sym = static_cast<Symbol>(s);
        if (alpha.exponent_sign(sym) < 0) continue;
        Perm p;
        if (alpha.is_involution(sym)) {
          p = random_involution(degree, rng);
        } else {
          p.resize(degree);
          std::iota(p.begin(), p.end(), 0);
          std::shuffle(p.begin(), p.end(), rng);
        }
        nontrivial = nontrivial || !is_identity(p);
        images[s] = p;
        if (!alpha.is_involution(sym)) images[alpha.inverse(sym)] = invert_perm(p);
      }
      if (!nontrivial) continue;
      if (std::all_of(relators.begin(), relators.end(), [&](const Word& r) { return kills(images, r, degree); })) {
        quotients_.push_back(Quotient{degree, offset, std::move(images)});
        offset += degree;
        break;
      }
    }
  }
  abelian_offset_ = offset;
  state_size_ = offset + (abelian_ ? 2 * alpha.generator_count() : 0);
}

ElementSignature::State ElementSignature::initial() const {
  State state(state_size_, 0);
  for (const auto& q : quotients_) {
    for (std::size_t i = 0; i < q.degree; ++i) state[q.offset + i] = static_cast<std::uint8_t>(i);
  }
  if (abelian_) {
    // Exponent sums stored as 16-bit biased counters.
    for (std::size_t g = 0; g < alphabet_->generator_count(); ++g) {
      state[abelian_offset_ + 2 * g] = 0x00;
      state[abelian_offset_ + 2 * g + 1] = 0x80;
    }
  }
  return state;
}

void ElementSignature::apply(State& state, Symbol s) const {
  for (const auto& q : quotients_) {
    const auto& img = q.images[s];
    for (std::size_t i = 0; i < q.degree; ++i) state[q.offset + i] = img[state[q.offset + i]];
  }
  if (abelian_) {
    const auto g = alphabet_->generator_of(s);
    auto* slot = &state[abelian_offset_ + 2 * g];
    auto value = static_cast<std::uint16_t>(slot[0] | (slot[1] << 8));
    value = static_cast<std::uint16_t>(value + alphabet_->exponent_sign(s));
    slot[0] = static_cast<std::uint8_t>(value & 0xff);
    slot[1] = static_cast<std::uint8_t>(value >> 8);
  }
}

ElementSignature::State ElementSignature::of(const GroupElement& g) const {
  if (by_word_) return State(g.word.begin(), g.word.end());
  State state = initial();
  for (Symbol s : g.word) apply(state, s);
  return state;
}

std::uint64_t ElementSignature::hash(const State& state) const {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ state.size();
  for (std::uint8_t byte : state) h = mix(h, byte);
  return h;
}

// ---------------------------------------------------------------------------
// Ball

Ball::Ball(const Group& group, int radius, BallOptions options)
    : group_(group), radius_(radius), signature_(std::make_shared<ElementSignature>(group)) {
  if (radius < 0) throw InputError("ball radius must be non-negative");
  const auto& alpha = group.alphabet();
  const std::size_t symbols = alpha.size();
  const bool by_word = signature_->uses_word();

  bucket_mask_ = (1U << 10) - 1;
  buckets_.assign(bucket_mask_ + 1, -1);

  auto add = [&](GroupElement g, int level, std::int32_t parent, Symbol via, ElementSignature::State state) {
    if (elements_.size() >= options.max_elements) {
      throw ResourceError("ball of radius " + std::to_string(radius) + " exceeds the element cap of " +
                          std::to_string(options.max_elements));
    }
    const auto key = signature_->hash(by_word ? ElementSignature::State(g.word.begin(), g.word.end()) : state);
    elements_.push_back(std::move(g));
    levels_.push_back(level);
    parent_.push_back(parent);
    parent_symbol_.push_back(via);
    if (!by_word) states_.push_back(std::move(state));
    adjacency_.resize(adjacency_.size() + symbols, -1);
    insert(elements_.size() - 1, key);
  };

  add(group.identity(), 0, -1, 0, by_word ? ElementSignature::State{} : signature_->initial());
  sphere_begin_.push_back(0);
  sphere_sizes_.push_back(1);

  for (int level = 0; level <= radius; ++level) {
    const std::size_t begin = sphere_begin_[static_cast<std::size_t>(level)];
    const std::size_t end = begin + sphere_sizes_[static_cast<std::size_t>(level)];
    if (level == radius && !options.outer_neighbors) break;
    if (level < radius) sphere_begin_.push_back(end);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t s = 0; s < symbols; ++s) {
        const auto sym = static_cast<Symbol>(s);
        Word w = elements_[i].word;
        w.push_back(sym);
        GroupElement candidate = group.normalize(w);
        ElementSignature::State state;
        std::uint64_t key = 0;
        if (by_word) {
          key = signature_->hash(ElementSignature::State(candidate.word.begin(), candidate.word.end()));
        } else {
          state = states_[i];
          signature_->apply(state, sym);
          key = signature_->hash(state);
        }
        if (auto found = lookup(candidate, key)) {
          adjacency_[i * symbols + s] = static_cast<std::int32_t>(*found);
          continue;
        }
        if (level == radius) continue;  // lies on sphere radius + 1
        add(std::move(candidate), level + 1, static_cast<std::int32_t>(i), sym, std::move(state));
        adjacency_[i * symbols + s] = static_cast<std::int32_t>(elements_.size() - 1);
      }
    }
    if (level < radius) sphere_sizes_.push_back(elements_.size() - end);
  }
  if (!by_word) {
    states_.clear();
    states_.shrink_to_fit();
  }
}

void Ball::insert(std::size_t index, std::uint64_t key) {
  if (elements_.size() > buckets_.size()) {
    // Grow and rehash.
    const std::size_t capacity = buckets_.size() * 4;
    bucket_mask_ = capacity - 1;
    buckets_.assign(capacity, -1);
    for (std::size_t j = 0; j < keys_.size(); ++j) {
      auto& head = buckets_[keys_[j] & bucket_mask_];
      chain_[j] = head;
      head = static_cast<std::int32_t>(j);
    }
  }
  keys_.push_back(key);
  chain_.push_back(-1);
  auto& head = buckets_[key & bucket_mask_];
  chain_[index] = head;
  head = static_cast<std::int32_t>(index);
}

std::optional<std::size_t> Ball::lookup(const GroupElement& g, std::uint64_t key) const {
  for (std::int32_t j = buckets_[key & bucket_mask_]; j >= 0; j = chain_[static_cast<std::size_t>(j)]) {
    const auto idx = static_cast<std::size_t>(j);
    if (keys_[idx] != key) continue;
    // Lengths of equal elements agree up to the Dehn slack; the group decides.
    if (group_.equal(elements_[idx], g)) return idx;
  }
  return std::nullopt;
}

std::optional<std::size_t> Ball::find(const GroupElement& g) const {
  if (g.group_id != group_.id()) throw InputError("element belongs to a different group");
  if (group_.has_unique_normal_forms() && g.word.size() > static_cast<std::size_t>(radius_)) return std::nullopt;
  const auto state = signature_->of(g);
  return lookup(g, signature_->hash(state));
}

std::int64_t Ball::neighbor(std::size_t i, Symbol s) const {
  return adjacency_.at(i * group_.alphabet().size() + s);
}

Word Ball::geodesic_word(std::size_t i) const {
  Word w;
  for (auto j = static_cast<std::int32_t>(i); parent_.at(static_cast<std::size_t>(j)) >= 0;
       j = parent_[static_cast<std::size_t>(j)]) {
    w.push_back(parent_symbol_[static_cast<std::size_t>(j)]);
  }
  std::reverse(w.begin(), w.end());
  return w;
}

Ball enumerate_ball(const Group& group, int radius, BallOptions options) { return Ball(group, radius, options); }

}  // namespace hyperlab
