#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperlab/metric.hpp"
#include "hyperlab/rational.hpp"

namespace hyperlab {

/// b(g)(x) = |x| - |g^-1 x| in word units (exact metrics).
std::int64_t busemann_exact(const MetricStructure& metric, const GroupElement& g, const GroupElement& x);
/// b(g)(x) in metric units.
double busemann_group(const MetricStructure& metric, const GroupElement& g, const GroupElement& x);

/// c_g(x, y) = <g,x> - <g,y> in word units (exact metrics); a half-integer.
Rational haagerup_exact(const MetricStructure& metric, const GroupElement& g, const GroupElement& x,
                        const GroupElement& y);
/// c_g(x, y) in metric units.
double haagerup_value(const MetricStructure& metric, const GroupElement& g, const GroupElement& x,
                      const GroupElement& y);

/// Ordered pairs (x, y) of a ball with K - C <= |x,y| <= K + C.
class DeltaDomain {
 public:
  const MetricStructure& metric() const { return metric_; }
  const Ball& ball() const { return *ball_; }
  std::shared_ptr<const Ball> shared_ball() const { return ball_; }
  double K() const { return K_; }
  double C() const { return C_; }
  int radius() const { return ball_->radius(); }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  /// Ball indices of the pairs, sorted by (x, y).
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs() const { return pairs_; }
  const GroupElement& x(std::size_t i) const { return ball_->element(pairs_.at(i).first); }
  const GroupElement& y(std::size_t i) const { return ball_->element(pairs_.at(i).second); }
  std::optional<std::size_t> find(std::size_t x_index, std::size_t y_index) const;
  std::optional<std::size_t> find(const GroupElement& x, const GroupElement& y) const;

 private:
  friend DeltaDomain build_delta(const MetricStructure& metric, double K, int radius, std::optional<double> C);
  DeltaDomain(MetricStructure metric, std::shared_ptr<const Ball> ball, double K, double C)
      : metric_(std::move(metric)), ball_(std::move(ball)), K_(K), C_(C) {}

  MetricStructure metric_;
  std::shared_ptr<const Ball> ball_;
  double K_ = 1.0;
  double C_ = 0.0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

/// Builds Delta on the radius-R ball. C defaults to the metric's rough constant.
/// Bounds are inclusive; float metrics allow 1e-9 slack.
DeltaDomain build_delta(const MetricStructure& metric, double K, int radius, std::optional<double> C = std::nullopt);

struct LpNormReport {
  double p = 1.0;
  double K = 0.0;
  double C = 0.0;
  int radius = 0;
  /// Truncated sum of |c_g|^p over Delta in the ball.
  double norm_p = 0.0;
  /// The same sum as an exact rational, for integer p on exact metrics.
  std::optional<Rational> exact_norm_p;
  /// Bound on the sum over pairs outside the ball (may be +inf).
  double tail_bound = 0.0;
  /// "tree-support", "pointwise" or "divergent".
  std::string tail_basis;
  /// Pointwise constant: |c_g(x,y)| <= C1 e^{-<x,y>}, C1 = e^{|g|}.
  double C1 = 0.0;
  /// Summability constant: tail <= C2 * sum_{m > R} |S_m| e^{-p eps m}.
  double C2 = 0.0;
};

LpNormReport lp_norm(const GroupElement& g, const DeltaDomain& delta, double p);

struct PropernessCertificate {
  GroupElement g;
  double K = 0.0;
  double C = 0.0;
  double p = 1.0;
  /// Parameter interval of the rough geodesic from 1 to g.
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  std::vector<double> partition;
  std::vector<GroupElement> points;
  /// c_g(gamma(t_i), gamma(t_{i+1})); these are close to -K under c_g = <g,x> - <g,y>.
  std::vector<double> segment_values;
  double lower_bound = 0.0;  // (K - 2C)^p n
  double count_bound = 0.0;  // (|g| - (K + C)) / K
  LpNormReport norm;
  bool verified = false;
};

PropernessCertificate properness_check(const GroupElement& g, const DeltaDomain& delta, double p);

struct CocycleIdentityReport {
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::uint64_t antisymmetry_failures = 0;
  std::uint64_t coboundary_failures = 0;
  std::optional<std::string> witness;
  bool passed() const { return failures == 0 && antisymmetry_failures == 0 && coboundary_failures == 0; }
};

/// c_{gh}(x,y) = c_g(x,y) + c_h(g^-1 x, g^-1 y) for all g, h in `elements` and
/// every pair of Delta, with each side evaluated from its own products.
/// Also checks antisymmetry and the coboundary form F - g.F.
CocycleIdentityReport check_cocycle_identity(const DeltaDomain& delta, const Ball& elements);

/// Finitely supported function on Delta, indexed like delta.pairs().
using DeltaVector = std::vector<Rational>;

struct AffineActionReport {
  std::uint64_t compositions_checked = 0;
  std::uint64_t composition_failures = 0;
  std::uint64_t isometry_checks = 0;
  std::uint64_t isometry_failures = 0;
  /// ||A_g(0)||_p^p = ||c_g||_p^p on the window, per element.
  std::vector<std::pair<GroupElement, double>> displacements;
  std::optional<std::string> witness;
  bool passed() const { return composition_failures == 0 && isometry_failures == 0; }
};

/// A_g(phi) = g.phi + c_g on the window Delta. Checks A_g A_h = A_{gh} pointwise
/// on every window pair and ||g.phi||_p = ||phi||_p for integer p.
/// Throws ResourceError when g.supp(phi) leaves the window.
AffineActionReport affine_action_check(const std::vector<GroupElement>& gs, const std::vector<DeltaVector>& phis,
                                       const DeltaDomain& delta, double p);

struct CriticalExponentRow {
  double p = 0.0;
  /// Cumulative sums of e^{-p<x,y>} over pairs with max(|x|,|y|) <= m.
  std::vector<double> partial_sums;
  /// Ratio of the last two radius increments.
  double ratio = 0.0;
  bool converges = false;
  /// (2k-1) e^{-p eps} for free groups, NaN otherwise.
  double predicted_ratio = 0.0;
};

struct CriticalExponentScan {
  std::vector<CriticalExponentRow> rows;
  /// Pairs with <x,y> = 0: the limit of the sum as p grows.
  std::size_t zero_product_pairs = 0;
};

CriticalExponentScan critical_exponent_scan(const DeltaDomain& delta, const std::vector<double>& ps);

}  // namespace hyperlab
