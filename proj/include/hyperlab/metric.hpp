#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperlab/ball.hpp"
#include "hyperlab/group.hpp"

namespace hyperlab {

enum class MetricKind { word, tree_exact, green };
enum class ValueMode { exact_rational, float_with_error };

std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(std::string_view text);

/// Finitely supported symmetric random walk used to build a Green metric.
struct GreenWalk {
  std::vector<std::pair<GroupElement, double>> steps;
  /// Absorbing boundary radius of the largest linear solve.
  int truncation = 12;
  /// Target accuracy of the first-passage probabilities.
  double tolerance = 1e-12;
  /// Elements up to this word length get a distance; defaults to truncation - 4.
  int query_radius = -1;

  /// Uniform measure on the generators and their inverses.
  static GreenWalk simple(const Group& group, int truncation = 12);
};

/// Diagnostics of a Green metric build.
struct GreenDiagnostics {
  int truncation = 0;
  int query_radius = 0;
  std::size_t unknowns = 0;
  std::vector<int> sweeps;  // Gauss-Seidel sweeps per truncation radius
  /// max |log F_extrapolated - log F_T| over queried elements: the gap of the
  /// raw absorbing-boundary lower bound.
  double truncation_gap = 0.0;
  /// max |log F_extrapolated(T) - log F_extrapolated(T-1)| over elements of
  /// length <= T-5.
  double extrapolation_error = 0.0;
};

/// An equivariant, roughly geodesic metric on a group.
///
/// Word and tree metrics are exact: lengths are integers in units of the scale
/// and Gromov products half-integers. Green metrics carry floating values with
/// a reported error estimate. Copies share state.
class MetricStructure {
 public:
  /// Word metric for the group's generators; `tree_exact` for free groups.
  /// `lookup_radius` bounds the lengths a small-cancellation group can resolve.
  static MetricStructure word(const Group& group, double scale = 1.0, int lookup_radius = 6);

  const Group& group() const;
  MetricKind kind() const;
  ValueMode value_mode() const;
  bool exact() const { return value_mode() == ValueMode::exact_rational; }
  double scale() const;
  double rough_constant() const;
  /// Largest word length this metric can evaluate.
  int lookup_radius() const;
  const GreenDiagnostics* green_diagnostics() const;

  /// Same metric rescaled by `factor` (Gromov products scale with it).
  MetricStructure rescaled(double factor) const;

  /// Integer word length |g| (exact kinds only).
  std::int64_t word_length(const GroupElement& g) const;
  std::int64_t word_distance(const GroupElement& x, const GroupElement& y) const;
  /// 2 * <x, y> based at the identity, in word units (exact kinds only).
  std::int64_t gromov_product_x2(const GroupElement& x, const GroupElement& y) const;

  double length(const GroupElement& g) const;
  double distance(const GroupElement& x, const GroupElement& y) const;
  double gromov_product(const GroupElement& x, const GroupElement& y) const;

  /// Word geodesic from 1 to g (shortlex least for small cancellation).
  Word geodesic_word(const GroupElement& g) const;

 private:
  struct State;
  explicit MetricStructure(std::shared_ptr<const State> state) : state_(std::move(state)) {}
  friend MetricStructure build_green_metric(const Group& group, const GreenWalk& walk);

  std::shared_ptr<const State> state_;
};

/// Green metric -log F(x, y) of the walk, by absorbing-boundary linear solves
/// at truncation radii T-5..T, extrapolated along radii of equal parity.
MetricStructure build_green_metric(const Group& group, const GreenWalk& walk);

struct Quadruple {
  GroupElement x, y, z, o;
};

struct FourPointReport {
  double max_defect = 0.0;
  std::optional<Quadruple> witness;
  std::uint64_t quadruples_checked = 0;
};

enum class ScanMode { exhaustive, sampled };

struct FourPointOptions {
  ScanMode mode = ScanMode::exhaustive;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t max_quadruples = 50'000'000'000ULL;
  /// Defects at or below this are reported as 0.
  double report_threshold = 1e-9;
};

/// Tests e^{-<x,y>_o} <= e^{-<x,z>_o} + e^{-<z,y>_o} over quadruples of the ball.
FourPointReport check_strong_hyperbolicity(const MetricStructure& metric, const Ball& ball,
                                           const FourPointOptions& options = {});

struct RoughGeodesic {
  std::vector<GroupElement> points;
  std::vector<double> parameters;
  /// Smallest C making |s-t| - C <= |g(s),g(t)| <= |s-t| + C hold on the path.
  double achieved_constant = 0.0;
};

RoughGeodesic rough_geodesic(const MetricStructure& metric, const GroupElement& x, const GroupElement& y);

/// Least-squares slope of log |S_n| for n = 1..R.
double growth_exponent(const Ball& ball);

}  // namespace hyperlab
