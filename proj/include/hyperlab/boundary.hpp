#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperlab/group.hpp"
#include "hyperlab/rational.hpp"

namespace hyperlab {

/// Eventually periodic boundary point u c c c ... of a free group.
///
/// Canonical form: c is cyclically reduced, primitive and the least of its
/// rotations in symbol order; u is the shortest prefix with u c^inf equal to
/// the point.
struct BoundaryPoint {
  Word prefix;
  Word period;
  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
};

/// Builds the canonical point u c^inf for any word u and nonempty c.
BoundaryPoint make_boundary_point(const Group& group, const Word& u, const Word& c);
/// Parses "u|c" (apostrophe inverses, u may be empty).
BoundaryPoint parse_boundary_point(const Group& group, std::string_view text);
std::string format(const Group& group, const BoundaryPoint& xi);

/// Letter i of the infinite word.
Symbol letter(const BoundaryPoint& xi, std::size_t i);
/// First n letters.
Word boundary_prefix(const BoundaryPoint& xi, std::size_t n);

BoundaryPoint act(const Group& group, const GroupElement& g, const BoundaryPoint& xi);

/// Gromov product value that may be +infinity (equal boundary points).
struct ExtendedLength {
  bool infinite = false;
  std::int64_t value = 0;
  friend bool operator==(const ExtendedLength&, const ExtendedLength&) = default;
};

ExtendedLength boundary_gromov(const Group& group, const BoundaryPoint& xi, const BoundaryPoint& eta);
std::int64_t boundary_gromov(const Group& group, const GroupElement& g, const BoundaryPoint& xi);

/// e^{-<xi,eta>}, zero when the points agree.
double visual_distance(const Group& group, const BoundaryPoint& xi, const BoundaryPoint& eta);

/// b(g)(xi) = 2<g,xi> - |g|.
std::int64_t busemann_boundary(const Group& group, const GroupElement& g, const BoundaryPoint& xi);

/// c_g(xi, eta) = <g,xi> - <g,eta>.
std::int64_t boundary_haagerup(const Group& group, const GroupElement& g, const BoundaryPoint& xi,
                               const BoundaryPoint& eta);

struct FixedPoints {
  BoundaryPoint attracting;
  BoundaryPoint repelling;
  std::int64_t translation_length = 0;
};

/// g+ = u c^inf and g- = u (c^-1)^inf for g = u c u^-1.
FixedPoints fixed_points(const Group& group, const GroupElement& g);

/// The uniform measure on the boundary of free:k.
struct BoundaryMeasure {
  int rank = 2;
  double dimension() const;
};

/// Reduced words of length `depth` in shortlex order; their cylinders partition the boundary.
std::vector<Word> cylinders(const Group& group, int depth);
std::size_t cylinder_count(int rank, int depth);
/// Position of the reduced word w in cylinders(group, |w|).
std::size_t cylinder_index(const Group& group, const Word& w);

/// mu(C_w) = 1 / (2k (2k-1)^{|w|-1}); the empty word is the whole boundary.
Rational cylinder_measure(const BoundaryMeasure& mu, const Group& group, const Word& w);

/// g.C_w is either a cylinder or the complement of one.
struct CylinderImage {
  Word word;
  bool complement = false;
};
CylinderImage translate_cylinder(const Group& group, const GroupElement& g, const Word& w);
Rational measure_of(const BoundaryMeasure& mu, const Group& group, const CylinderImage& image);

struct ConformalityRecord {
  Word cylinder;
  Rational ratio;
  std::int64_t busemann = 0;
  bool passed = false;
};

struct ConformalityReport {
  std::size_t cylinders_checked = 0;
  std::size_t failures = 0;
  std::vector<ConformalityRecord> records;
  bool passed() const { return failures == 0; }
};

/// mu(g^-1 C_w) / mu(C_w) = (2k-1)^{b(g)(xi)} for every cylinder of the depth.
/// Throws InputError naming a cylinder on which b(g) is not constant.
ConformalityReport conformality_check(const Group& group, const GroupElement& g, int depth);

struct ConformalIdentityReport {
  std::int64_t lhs = 0;  // 2<g xi, g eta>
  std::int64_t rhs = 0;  // -b(g^-1)(xi) - b(g^-1)(eta) + 2<xi, eta>
  bool passed = false;
};

ConformalIdentityReport conformal_identity_check(const Group& group, const GroupElement& g, const BoundaryPoint& xi,
                                                 const BoundaryPoint& eta);

/// Seeded eventually periodic points with preperiod <= max_prefix and period <= max_period.
std::vector<BoundaryPoint> seeded_points(const Group& group, std::size_t count, std::uint64_t seed,
                                         int max_prefix = 4, int max_period = 3);

}  // namespace hyperlab
