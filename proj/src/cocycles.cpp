#include "hyperlab/cocycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "hyperlab/errors.hpp"

namespace hyperlab {

namespace {

constexpr double kFloatTolerance = 1e-9;

/// Length in word units for exact metrics, metric units otherwise.
double raw_length(const MetricStructure& m, const GroupElement& g) {
  return m.exact() ? static_cast<double>(m.word_length(g)) : m.length(g);
}

/// Converts raw_length units to metric units.
double unit(const MetricStructure& m) { return m.exact() ? m.scale() : 1.0; }

double tolerance(const MetricStructure& m) { return m.exact() ? 0.0 : kFloatTolerance; }

std::uint64_t pair_key(std::size_t x, std::size_t y) { return (static_cast<std::uint64_t>(x) << 32) | y; }

Rational rational_abs_pow(Rational v, int p) {
  if (v < 0) v = -v;
  return rational_power(v, p);
}

bool is_integer(double p) { return std::floor(p) == p && p <= 64; }

/// |S_m| for m >= 1: exact for free groups, the reduced-word count otherwise.
double sphere_bound(const Group& group, int m) {
  const double s = static_cast<double>(group.alphabet().size());
  return s * std::pow(s - 1.0, m - 1);
}

std::string describe(const Group& G, std::initializer_list<std::pair<const char*, const GroupElement*>> items) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, el] : items) {
    if (!first) out << ' ';
    out << name << '=' << G.format(*el);
    first = false;
  }
  return out.str();
}

}  // namespace

std::int64_t busemann_exact(const MetricStructure& metric, const GroupElement& g, const GroupElement& x) {
  const auto& G = metric.group();
  return metric.word_length(x) - metric.word_length(G.multiply(G.invert(g), x));
}

double busemann_group(const MetricStructure& metric, const GroupElement& g, const GroupElement& x) {
  const auto& G = metric.group();
  return metric.length(x) - metric.length(G.multiply(G.invert(g), x));
}

Rational haagerup_exact(const MetricStructure& metric, const GroupElement& g, const GroupElement& x,
                        const GroupElement& y) {
  const auto twice = busemann_exact(metric, g, x) - busemann_exact(metric, g, y);
  return Rational(twice, 2);
}

double haagerup_value(const MetricStructure& metric, const GroupElement& g, const GroupElement& x,
                      const GroupElement& y) {
  return 0.5 * (busemann_group(metric, g, x) - busemann_group(metric, g, y));
}

// ---------------------------------------------------------------------------
// Delta

std::optional<std::size_t> DeltaDomain::find(std::size_t x_index, std::size_t y_index) const {
  const auto it = index_.find(pair_key(x_index, y_index));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> DeltaDomain::find(const GroupElement& x, const GroupElement& y) const {
  const auto xi = ball_->find(x);
  const auto yi = ball_->find(y);
  if (!xi || !yi) return std::nullopt;
  return find(*xi, *yi);
}

DeltaDomain build_delta(const MetricStructure& metric, double K, int radius, std::optional<double> C_opt) {
  const double C = C_opt.value_or(metric.rough_constant());
  if (!(K > 0.0) || !std::isfinite(K)) throw InputError("K must be positive");
  if (!(C >= 0.0) || !std::isfinite(C)) throw InputError("C must be non-negative");
  if (!(K > 2.0 * C)) throw InputError("Delta requires K > 2C");
  if (radius < 0) throw InputError("Delta radius must be non-negative");
  const auto& G = metric.group();

  // Elements h with K - C <= |h| <= K + C; then (x, x h) runs over Delta.
  std::vector<GroupElement> shell;
  const double lo = K - C, hi = K + C;
  if (metric.exact()) {
    const double eps = metric.scale();
    const int wmin = static_cast<int>(std::ceil(lo / eps - 1e-12));
    const int wmax = static_cast<int>(std::floor(hi / eps + 1e-12));
    if (wmax >= 0 && wmin <= 2 * radius) {
      const Ball words(G, std::min(wmax, 2 * radius), BallOptions{8'000'000, false});
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (words.length(i) >= wmin) shell.push_back(words.element(i));
      }
    }
  } else {
    const Ball words(G, std::min(metric.lookup_radius(), 2 * radius), BallOptions{8'000'000, false});
    for (const auto& h : words.elements()) {
      const double d = metric.length(h);
      if (d >= lo - kFloatTolerance && d <= hi + kFloatTolerance) shell.push_back(h);
    }
  }

  auto ball = std::make_shared<const Ball>(G, radius, BallOptions{8'000'000, false});
  DeltaDomain delta(metric, ball, K, C);
  for (std::size_t i = 0; i < ball->size(); ++i) {
    for (const auto& h : shell) {
      if (const auto j = ball->find(G.multiply(ball->element(i), h))) {
        delta.pairs_.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(*j));
      }
    }
  }
  std::sort(delta.pairs_.begin(), delta.pairs_.end());
  delta.pairs_.erase(std::unique(delta.pairs_.begin(), delta.pairs_.end()), delta.pairs_.end());
  for (std::size_t k = 0; k < delta.pairs_.size(); ++k) {
    delta.index_.emplace(pair_key(delta.pairs_[k].first, delta.pairs_[k].second), static_cast<std::uint32_t>(k));
  }
  return delta;
}

// ---------------------------------------------------------------------------
// Norms

LpNormReport lp_norm(const GroupElement& g, const DeltaDomain& delta, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p must be at least 1");
  const auto& m = delta.metric();
  const auto& G = m.group();
  const auto& ball = delta.ball();
  const auto ginv = G.invert(g);

  LpNormReport report;
  report.p = p;
  report.K = delta.K();
  report.C = delta.C();
  report.radius = delta.radius();

  std::vector<double> shifted(ball.size(), 0.0);
  std::vector<double> own(ball.size(), 0.0);
  std::vector<char> used(ball.size(), 0);
  for (const auto& [x, y] : delta.pairs()) used[x] = used[y] = 1;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (!used[i]) continue;
    own[i] = raw_length(m, ball.element(i));
    shifted[i] = raw_length(m, G.multiply(ginv, ball.element(i)));
  }

  const bool exact = m.exact() && m.scale() == 1.0 && is_integer(p);
  Rational exact_sum(0);
  double sum = 0.0;
  for (const auto& [x, y] : delta.pairs()) {
    const double twice = (own[x] - shifted[x]) - (own[y] - shifted[y]);
    const double value = 0.5 * twice * unit(m);
    sum += std::pow(std::abs(value), p);
    if (exact) exact_sum += rational_abs_pow(Rational(static_cast<std::int64_t>(twice), 2), static_cast<int>(p));
  }
  report.norm_p = sum;
  if (exact) report.exact_norm_p = exact_sum;

  // Tail outside the ball.
  const double g_len = m.length(g);
  const double K = delta.K(), C = delta.C();
  report.C1 = std::exp(g_len);
  if (m.kind() == MetricKind::tree_exact && m.scale() * delta.radius() >= g_len + K + C - 1e-12) {
    // In a tree c_g(x,y) != 0 forces the geodesic [x,y] to meet [1,g], so both
    // points lie within K + C of it.
    report.tail_bound = 0.0;
    report.tail_basis = "tree-support";
    return report;
  }
  if (!m.exact()) {
    report.tail_bound = std::numeric_limits<double>::infinity();
    report.tail_basis = "divergent";
    return report;
  }
  const double eps = m.scale();
  const double s = static_cast<double>(G.alphabet().size());
  const int reach = static_cast<int>(std::floor((K + C) / eps + 1e-12));
  double neighbours = 1.0;
  for (int j = 1; j <= reach; ++j) neighbours += sphere_bound(G, j);
  report.C2 = 2.0 * neighbours * std::exp(p * (g_len + K + C));
  const double q = (s - 1.0) * std::exp(-p * eps);
  if (q >= 1.0) {
    report.tail_bound = std::numeric_limits<double>::infinity();
    report.tail_basis = "divergent";
    return report;
  }
  // sum_{m > R} s (s-1)^{m-1} e^{-p eps m} = s/(s-1) q^{R+1} / (1 - q).
  const double series = s / (s - 1.0) * std::pow(q, delta.radius() + 1) / (1.0 - q);
  report.tail_bound = report.C2 * series;
  report.tail_basis = "pointwise";
  return report;
}

// ---------------------------------------------------------------------------
// Properness

PropernessCertificate properness_check(const GroupElement& g, const DeltaDomain& delta, double p) {
  const auto& m = delta.metric();
  const auto& G = m.group();
  const double K = delta.K(), C = delta.C();
  PropernessCertificate cert;
  cert.g = g;
  cert.K = K;
  cert.C = C;
  cert.p = p;
  cert.norm = lp_norm(g, delta, p);
  const double g_len = m.length(g);
  cert.count_bound = (g_len - (K + C)) / K;

  const auto path = rough_geodesic(m, G.identity(), g);
  cert.a = path.parameters.front();
  cert.b = path.parameters.back();
  cert.n = static_cast<int>(std::floor((cert.b - cert.a) / K + 1e-12));
  const double tol = std::max(tolerance(m), 1e-12);

  auto point_at = [&](double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < path.parameters.size(); ++i) {
      if (std::abs(path.parameters[i] - t) < std::abs(path.parameters[best] - t) - 1e-12) best = i;
    }
    return best;
  };

  bool ok = true;
  std::optional<std::size_t> previous;
  for (int i = 0; i <= cert.n; ++i) {
    const double t = cert.a + K * i;
    cert.partition.push_back(t);
    const auto& point = path.points[point_at(t)];
    cert.points.push_back(point);
    const auto idx = delta.ball().find(point);
    if (!idx) {
      throw ResourceError("properness check needs a Delta radius of at least " +
                          std::to_string(static_cast<int>(std::ceil(g_len / m.scale()))));
    }
    if (previous) {
      if (!delta.find(*previous, *idx)) {
        throw InvariantViolation("partition pair (" + G.format(delta.ball().element(*previous)) + ", " +
                                 G.format(point) + ") is outside Delta; the rough constant is too small");
      }
      const double value = haagerup_value(m, g, delta.ball().element(*previous), point);
      cert.segment_values.push_back(value);
      if (std::abs(value) < K - 2.0 * C - tol) ok = false;
    }
    previous = idx;
  }
  cert.lower_bound = std::pow(K - 2.0 * C, p) * cert.n;
  if (cert.norm.norm_p < cert.lower_bound - tol * std::max(1.0, cert.lower_bound)) ok = false;
  if (cert.n < cert.count_bound - 1e-12) ok = false;
  cert.verified = ok;
  return cert;
}

// ---------------------------------------------------------------------------
// Cocycle identity

CocycleIdentityReport check_cocycle_identity(const DeltaDomain& delta, const Ball& elements) {
  const auto& m = delta.metric();
  const auto& G = m.group();
  const auto& ball = delta.ball();
  if (elements.group() != G) throw InputError("elements belong to a different group");
  const double tol = tolerance(m);
  const std::size_t n = ball.size();
  const std::size_t e = elements.size();

  std::vector<double> own(n);
  for (std::size_t i = 0; i < n; ++i) own[i] = raw_length(m, ball.element(i));

  // U[g][x] = g^-1 x and its length.
  std::vector<std::vector<GroupElement>> U(e);
  std::vector<std::vector<double>> LU(e);
  std::vector<GroupElement> inverses(e, G.identity());
  for (std::size_t gi = 0; gi < e; ++gi) {
    inverses[gi] = G.invert(elements.element(gi));
    U[gi].reserve(n);
    LU[gi].reserve(n);
    for (std::size_t x = 0; x < n; ++x) {
      U[gi].push_back(G.multiply(inverses[gi], ball.element(x)));
      LU[gi].push_back(raw_length(m, U[gi].back()));
    }
  }

  CocycleIdentityReport report;
  auto twice_c = [&](const std::vector<double>& shifted, std::size_t x, std::size_t y) {
    return (own[x] - shifted[x]) - (own[y] - shifted[y]);
  };

  // Antisymmetry and the coboundary form, per g.
  for (std::size_t gi = 0; gi < e; ++gi) {
    const auto& g = elements.element(gi);
    const double g_len = raw_length(m, g);
    std::vector<double> dist_gx(n);
    for (std::size_t x = 0; x < n; ++x) dist_gx[x] = raw_length(m, G.multiply(G.invert(ball.element(x)), g));
    for (std::size_t k = 0; k < delta.size(); ++k) {
      const auto [x, y] = delta.pairs()[k];
      const double c = twice_c(LU[gi], x, y);
      const auto swapped = delta.find(y, x);
      if (!swapped || std::abs(twice_c(LU[gi], y, x) + c) > tol) ++report.antisymmetry_failures;
      // <g,x> - <g,y> with d(g, x) measured as |x^-1 g|.
      const double gromov = (g_len + own[x] - dist_gx[x]) - (g_len + own[y] - dist_gx[y]);
      if (std::abs(gromov - c) > tol) {
        ++report.coboundary_failures;
        if (!report.witness) {
          report.witness = "coboundary " + describe(G, {{"g", &g}, {"x", &ball.element(x)}, {"y", &ball.element(y)}});
        }
      }
    }
  }

  std::vector<double> A(n), B(n);
  for (std::size_t gi = 0; gi < e; ++gi) {
    for (std::size_t hi = 0; hi < e; ++hi) {
      const auto& g = elements.element(gi);
      const auto& h = elements.element(hi);
      const auto gh_inv = G.invert(G.multiply(g, h));
      for (std::size_t x = 0; x < n; ++x) {
        A[x] = raw_length(m, G.multiply(gh_inv, ball.element(x)));
        B[x] = raw_length(m, G.multiply(inverses[hi], U[gi][x]));
      }
      for (const auto& [x, y] : delta.pairs()) {
        const double lhs = twice_c(A, x, y);
        const double c_g = twice_c(LU[gi], x, y);
        const double c_h = (LU[gi][x] - B[x]) - (LU[gi][y] - B[y]);
        ++report.checks;
        if (std::abs(lhs - (c_g + c_h)) > tol) {
          ++report.failures;
          if (!report.witness) {
            report.witness = describe(G, {{"g", &g}, {"h", &h}, {"x", &ball.element(x)}, {"y", &ball.element(y)}});
          }
        }
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Affine action

AffineActionReport affine_action_check(const std::vector<GroupElement>& gs, const std::vector<DeltaVector>& phis,
                                       const DeltaDomain& delta, double p) {
  const auto& m = delta.metric();
  if (!m.exact()) throw UnsupportedError("affine action check needs an exact metric");
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  const auto& G = m.group();
  const auto& ball = delta.ball();
  const std::size_t n = ball.size();
  for (const auto& phi : phis) {
    if (phi.size() != delta.size()) throw InputError("test vector does not match the Delta window");
  }

  std::vector<std::int64_t> own(n);
  for (std::size_t i = 0; i < n; ++i) own[i] = m.word_length(ball.element(i));

  struct Translate {
    std::vector<GroupElement> elements;  // u^-1 x
    std::vector<std::int64_t> lengths;
    std::vector<std::int64_t> index;  // in the window ball, -1 outside
  };
  auto translate = [&](const GroupElement& u_inv, const std::vector<GroupElement>& xs) {
    Translate t;
    for (const auto& x : xs) {
      t.elements.push_back(G.multiply(u_inv, x));
      t.lengths.push_back(m.word_length(t.elements.back()));
      const auto idx = ball.find(t.elements.back());
      t.index.push_back(idx ? static_cast<std::int64_t>(*idx) : -1);
    }
    return t;
  };
  auto phi_at = [&](const DeltaVector& phi, std::int64_t i, std::int64_t j) {
    if (i < 0 || j < 0) return Rational(0);
    const auto k = delta.find(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return k ? phi[*k] : Rational(0);
  };

  std::vector<Translate> by_g;
  for (const auto& g : gs) by_g.push_back(translate(G.invert(g), ball.elements()));

  AffineActionReport report;
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    const auto& tg = by_g[gi];
    for (std::size_t hi = 0; hi < gs.size(); ++hi) {
      const auto& g = gs[gi];
      const auto& h = gs[hi];
      const auto tgh = translate(G.invert(G.multiply(g, h)), ball.elements());
      const auto th = translate(G.invert(h), tg.elements);  // h^-1 (g^-1 x)
      for (const auto& [x, y] : delta.pairs()) {
        const Rational c_g((own[x] - tg.lengths[x]) - (own[y] - tg.lengths[y]), 2);
        const Rational c_h((tg.lengths[x] - th.lengths[x]) - (tg.lengths[y] - th.lengths[y]), 2);
        const Rational c_gh((own[x] - tgh.lengths[x]) - (own[y] - tgh.lengths[y]), 2);
        for (const auto& phi : phis) {
          const Rational composed = phi_at(phi, th.index[x], th.index[y]) + c_h + c_g;
          const Rational direct = phi_at(phi, tgh.index[x], tgh.index[y]) + c_gh;
          ++report.compositions_checked;
          if (composed != direct) {
            ++report.composition_failures;
            if (!report.witness) {
              report.witness = describe(G, {{"g", &g}, {"h", &h}, {"x", &ball.element(x)}, {"y", &ball.element(y)}});
            }
          }
        }
      }
    }
  }

  // Linear part: ||g.phi||_p = ||phi||_p, with g.supp(phi) inside the window.
  const bool integral = is_integer(p);
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    const auto& g = gs[gi];
    for (const auto& phi : phis) {
      int needed = 0;
      for (std::size_t k = 0; k < delta.size(); ++k) {
        if (phi[k] == Rational(0)) continue;
        for (const auto& pt : {delta.x(k), delta.y(k)}) {
          const auto moved = G.multiply(g, pt);
          needed = std::max(needed, static_cast<int>(m.word_length(moved)));
        }
      }
      if (needed > delta.radius()) {
        throw ResourceError("translated test vector leaves the window; radius " + std::to_string(needed) +
                            " is required");
      }
      Rational before(0), after(0);
      double before_f = 0.0, after_f = 0.0;
      for (std::size_t k = 0; k < delta.size(); ++k) {
        const auto [x, y] = delta.pairs()[k];
        const Rational orig = phi[k];
        const Rational moved = phi_at(phi, by_g[gi].index[x], by_g[gi].index[y]);
        if (integral) {
          before += rational_abs_pow(orig, static_cast<int>(p));
          after += rational_abs_pow(moved, static_cast<int>(p));
        } else {
          before_f += std::pow(std::abs(boost::rational_cast<double>(orig)), p);
          after_f += std::pow(std::abs(boost::rational_cast<double>(moved)), p);
        }
      }
      ++report.isometry_checks;
      const bool equal = integral ? before == after : std::abs(before_f - after_f) <= 1e-9 * std::max(1.0, before_f);
      if (!equal) {
        ++report.isometry_failures;
        if (!report.witness) report.witness = "isometry g=" + G.format(g);
      }
    }
    report.displacements.emplace_back(g, lp_norm(g, delta, p).norm_p);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Critical exponent

CriticalExponentScan critical_exponent_scan(const DeltaDomain& delta, const std::vector<double>& ps) {
  for (double p : ps) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("p grid values must be at least 1");
  }
  if (delta.radius() < 2) throw InputError("critical exponent scan needs a Delta radius of at least 2");
  const auto& m = delta.metric();
  const auto& G = m.group();
  const auto& ball = delta.ball();
  const int R = delta.radius();

  // Products grouped by max(|x|,|y|); exact metrics group equal products.
  std::vector<std::map<double, std::size_t>> by_radius(static_cast<std::size_t>(R) + 1);
  CriticalExponentScan scan;
  for (const auto& [x, y] : delta.pairs()) {
    const int level = std::max(ball.length(x), ball.length(y));
    const double product = m.gromov_product(ball.element(x), ball.element(y));
    if (std::abs(product) <= 1e-12) ++scan.zero_product_pairs;
    ++by_radius[static_cast<std::size_t>(level)][product];
  }

  for (double p : ps) {
    CriticalExponentRow row;
    row.p = p;
    std::vector<double> increments;
    double total = 0.0;
    for (const auto& bucket : by_radius) {
      double inc = 0.0;
      for (const auto& [product, count] : bucket) inc += static_cast<double>(count) * std::exp(-p * product);
      increments.push_back(inc);
      total += inc;
      row.partial_sums.push_back(total);
    }
    const double last = increments[static_cast<std::size_t>(R)];
    const double prev = increments[static_cast<std::size_t>(R) - 1];
    if (!(prev > 0.0)) throw NumericError("critical exponent scan: empty radius increment");
    row.ratio = last / prev;
    row.converges = row.ratio < 1.0;
    row.predicted_ratio = G.kind() == PresentationKind::free && m.exact()
                              ? (2.0 * G.free_rank() - 1.0) * std::exp(-p * m.scale())
                              : std::numeric_limits<double>::quiet_NaN();
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

}  // namespace hyperlab
