#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hyperlab/group.hpp"

namespace hyperlab {

struct BallOptions {
  std::size_t max_elements = 4'000'000;
  /// Also record right-neighbours of the outermost sphere (needed by random
  /// walk solvers, not by length lookups).
  bool outer_neighbors = true;
};

/// Invariant hash for group elements: equal elements always hash equal.
///
/// Free and free-product kinds hash their unique normal form. Small-cancellation
/// kinds hash the images of the element in a few finite permutation quotients
/// together with the abelianization when every relator is balanced. Equality
/// behind a hash hit is still decided by the group.
class ElementSignature {
 public:
  explicit ElementSignature(const Group& group);

  using State = std::vector<std::uint8_t>;

  State initial() const;
  void apply(State& state, Symbol s) const;
  State of(const GroupElement& g) const;
  std::uint64_t hash(const State& state) const;
  bool uses_word() const { return by_word_; }
  std::size_t quotient_count() const { return quotients_.size(); }

 private:
  struct Quotient {
    std::size_t degree = 0;
    std::size_t offset = 0;
    std::vector<std::vector<std::uint8_t>> images;  // per symbol
  };

  bool by_word_ = true;
  bool abelian_ = false;
  std::size_t abelian_offset_ = 0;
  std::size_t state_size_ = 0;
  std::vector<Quotient> quotients_;
  const Alphabet* alphabet_ = nullptr;
  Group group_;
};

/// Exact ball of radius R in the word metric, enumerated breadth first in
/// shortlex order, with the right Cayley-graph adjacency restricted to it.
class Ball {
 public:
  Ball(const Group& group, int radius, BallOptions options = {});

  const Group& group() const { return group_; }
  int radius() const { return radius_; }
  std::size_t size() const { return elements_.size(); }
  const GroupElement& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const std::vector<std::size_t>& sphere_sizes() const { return sphere_sizes_; }
  std::size_t sphere_begin(int n) const { return sphere_begin_.at(static_cast<std::size_t>(n)); }
  /// Word length of element i (its BFS level).
  int length(std::size_t i) const { return levels_.at(i); }

  std::optional<std::size_t> find(const GroupElement& g) const;
  /// Index of element(i) * s, or -1 when it lies outside the ball.
  std::int64_t neighbor(std::size_t i, Symbol s) const;
  /// The shortlex-least geodesic word reaching element i.
  Word geodesic_word(std::size_t i) const;

 private:
  std::optional<std::size_t> lookup(const GroupElement& g, std::uint64_t key) const;
  void insert(std::size_t index, std::uint64_t key);

  Group group_;
  int radius_ = 0;
  std::vector<GroupElement> elements_;
  std::vector<int> levels_;
  std::vector<std::size_t> sphere_sizes_;
  std::vector<std::size_t> sphere_begin_;
  std::vector<std::int32_t> adjacency_;
  std::vector<std::int32_t> parent_;
  std::vector<Symbol> parent_symbol_;
  std::shared_ptr<const ElementSignature> signature_;
  std::vector<ElementSignature::State> states_;
  // Open hash chains keyed by invariant hash.
  std::vector<std::int32_t> buckets_;
  std::vector<std::int32_t> chain_;
  std::vector<std::uint64_t> keys_;
  std::size_t bucket_mask_ = 0;
};

Ball enumerate_ball(const Group& group, int radius, BallOptions options = {});

}  // namespace hyperlab
