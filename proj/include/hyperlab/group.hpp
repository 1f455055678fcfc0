#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperlab {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// Ordered generating symbols with their formal inverses.
///
/// Symbol order is the declared order and drives every shortlex comparison.
/// A symbol equal to its own inverse marks an order-2 generator.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::vector<std::string> names, std::vector<Symbol> inverse);

  /// Symbols `g` and `g'` for each generator, in the order a, a', b, b', ...
  /// Generators flagged in `involutions` get a single self-inverse symbol.
  static Alphabet from_generators(const std::vector<std::string>& generators,
                                  const std::vector<bool>& involutions = {});

  std::size_t size() const { return names_.size(); }
  const std::string& name(Symbol s) const { return names_.at(s); }
  Symbol inverse(Symbol s) const { return inverse_.at(s); }
  bool is_involution(Symbol s) const { return inverse_.at(s) == s; }
  std::optional<Symbol> find(std::string_view name) const;

  /// Generator index of a symbol (a and a' share one index).
  std::size_t generator_of(Symbol s) const { return generator_.at(s); }
  std::size_t generator_count() const { return generator_count_; }
  /// +1 for the positive symbol of a generator, -1 for its formal inverse.
  int exponent_sign(Symbol s) const { return sign_.at(s); }

  Word parse(std::string_view text) const;
  std::string format(std::span<const Symbol> word) const;

 private:
  std::vector<std::string> names_;
  std::vector<Symbol> inverse_;
  std::vector<std::size_t> generator_;
  std::vector<int> sign_;
  std::size_t generator_count_ = 0;
};

enum class PresentationKind { free, free_product_of_cyclics, small_cancellation };

std::string to_string(PresentationKind kind);

struct GroupPresentation {
  Alphabet alphabet;
  std::vector<Word> relators;
  PresentationKind kind = PresentationKind::free;
  /// Per generator: the finite order of its cyclic factor, or 0 for infinite.
  /// Only meaningful for the free and free-product kinds.
  std::vector<int> orders;
};

/// Element of a specific group: a canonical word for free and free-product
/// kinds, a Dehn-reduced word for small-cancellation kinds.
struct GroupElement {
  Word word;
  std::uint64_t group_id = 0;

  std::size_t size() const { return word.size(); }
  bool empty() const { return word.empty(); }
};

/// g = conjugator * core * conjugator^-1 with the core cyclically reduced.
struct CyclicDecomposition {
  GroupElement conjugator;
  GroupElement core;
};

/// Immutable handle to a finitely generated group with a solvable word
/// problem. Copies share one underlying presentation.
class Group {
 public:
  explicit Group(GroupPresentation presentation);

  static Group free(int rank);
  static Group surface(int genus);
  /// Z/2 * Z/3 with generators a (order 2) and b (order 3).
  static Group modular();
  /// `free:k`, `surface:g`, `modular`, or `file:<path>`.
  static Group from_spec(std::string_view spec);
  /// Plain-text presentation: a `generators:` line then one relator per line.
  static Group from_text(std::string_view text);

  const GroupPresentation& presentation() const { return impl_->presentation; }
  const Alphabet& alphabet() const { return impl_->presentation.alphabet; }
  PresentationKind kind() const { return impl_->presentation.kind; }
  std::uint64_t id() const { return impl_->id; }
  const std::string& spec() const { return impl_->spec; }
  /// Rank of a free group; 0 for other kinds.
  int free_rank() const;
  /// True when canonical words are unique (free and free-product kinds).
  bool has_unique_normal_forms() const { return kind() != PresentationKind::small_cancellation; }

  GroupElement identity() const { return GroupElement{{}, id()}; }
  GroupElement normalize(std::span<const Symbol> word) const;
  GroupElement element(std::string_view text) const;
  GroupElement generator(Symbol s) const;

  GroupElement multiply(const GroupElement& g, const GroupElement& h) const;
  GroupElement invert(const GroupElement& g) const;
  bool is_trivial(const GroupElement& g) const;
  bool equal(const GroupElement& g, const GroupElement& h) const;
  CyclicDecomposition cyclically_reduce(const GroupElement& g) const;
  /// Non-trivial element of finite order (only possible for free-product kinds).
  bool is_torsion(const GroupElement& g) const;

  std::string format(const GroupElement& g) const;

  friend bool operator==(const Group& a, const Group& b) { return a.id() == b.id(); }

 private:
  struct Impl {
    GroupPresentation presentation;
    std::uint64_t id = 0;
    std::string spec;
    /// Cyclic conjugates of every relator and its inverse (small-cancellation).
    std::vector<Word> relator_conjugates;
  };

  void check_membership(const GroupElement& g) const;
  Word reduce(std::span<const Symbol> word) const;
  Word dehn_reduce(Word word) const;

  std::shared_ptr<Impl> impl_;
};

/// Free reduction using the alphabet's involution.
Word free_reduce(const Alphabet& alphabet, std::span<const Symbol> word);
Word inverse_word(const Alphabet& alphabet, std::span<const Symbol> word);
/// Shortlex comparison: length first, then symbol order.
bool shortlex_less(std::span<const Symbol> a, std::span<const Symbol> b);

/// Longest common piece among distinct cyclic conjugates of relators and
/// their inverses.
std::size_t max_piece_length(const Alphabet& alphabet, const std::vector<Word>& relators);

}  // namespace hyperlab
