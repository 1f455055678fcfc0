#include <cmath>
#include <random>

#include "hyperlab/errors.hpp"
#include "hyperlab/metric.hpp"

namespace hyperlab {

namespace {

/// Pairwise distances on the ball, in metric units.
std::vector<double> distance_matrix(const MetricStructure& metric, const Ball& ball) {
  const std::size_t n = ball.size();
  const auto& G = metric.group();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto inv = G.invert(ball.element(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto v = metric.length(G.multiply(inv, ball.element(j)));
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

}  // namespace

FourPointReport check_strong_hyperbolicity(const MetricStructure& metric, const Ball& ball,
                                           const FourPointOptions& options) {
  if (ball.size() == 0) throw InputError("four-point check needs a nonempty ball");
  if (ball.group() != metric.group()) throw InputError("ball and metric belong to different groups");
  const std::size_t n = ball.size();
  const auto d = distance_matrix(metric, ball);
  FourPointReport report;
  double best = options.report_threshold;
  std::size_t wo = 0, wx = 0, wy = 0, wz = 0;
  bool found = false;

  auto product = [&](std::size_t o, std::size_t x, std::size_t y) {
    return 0.5 * (d[o * n + x] + d[o * n + y] - d[x * n + y]);
  };

  if (options.mode == ScanMode::exhaustive) {
    const double total = std::pow(static_cast<double>(n), 4);
    if (total > static_cast<double>(options.max_quadruples)) {
      throw ResourceError("exhaustive four-point scan needs " + std::to_string(static_cast<std::uint64_t>(total)) +
                          " quadruples, above the cap of " + std::to_string(options.max_quadruples));
    }
    // E[x][z] = exp(-<x,z>_o). For fixed (o, x) the minimum over z of
    // E[x][z] + E[z][y] is accumulated for all y at once. The defect is
    // symmetric in (x, y), so y >= x suffices and keeps the witness order.
    std::vector<double> E(n * n);
    std::vector<double> acc(n);
    for (std::size_t o = 0; o < n; ++o) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t z = 0; z < n; ++z) E[x * n + z] = std::exp(-product(o, x, z));
      }
      for (std::size_t x = 0; x < n; ++x) {
        const double* ex = &E[x * n];
        double* a = acc.data();
        for (std::size_t y = x; y < n; ++y) a[y] = ex[0] + E[y];
        for (std::size_t z = 1; z < n; ++z) {
          const double base = ex[z];
          const double* ez = &E[z * n];
          for (std::size_t y = x; y < n; ++y) {
            const double v = base + ez[y];
            a[y] = v < a[y] ? v : a[y];
          }
        }
        for (std::size_t y = x; y < n; ++y) {
          const double defect = ex[y] - a[y];
          if (defect > best) {
            best = defect;
            found = true;
            wo = o;
            wx = x;
            wy = y;
            const double* ey = &E[y * n];
            for (std::size_t z = 0; z < n; ++z) {
              if (ex[z] + ey[z] == a[y]) {
                wz = z;
                break;
              }
            }
          }
        }
      }
    }
    report.quadruples_checked = static_cast<std::uint64_t>(total);
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::uint64_t k = 0; k < options.samples; ++k) {
      const auto o = pick(rng), x = pick(rng), y = pick(rng), z = pick(rng);
      const double defect =
          std::exp(-product(o, x, y)) - std::exp(-product(o, x, z)) - std::exp(-product(o, z, y));
      if (defect > best) {
        best = defect;
        found = true;
        wo = o;
        wx = x;
        wy = y;
        wz = z;
      }
    }
    report.quadruples_checked = options.samples;
  }

  if (found) {
    report.max_defect = best;
    report.witness = Quadruple{ball.element(wx), ball.element(wy), ball.element(wz), ball.element(wo)};
  }
  return report;
}

}  // namespace hyperlab
