#include "hyperlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hyperlab/ball.hpp"
#include "hyperlab/boundary.hpp"
#include "hyperlab/cocycles.hpp"
#include "hyperlab/crossed_product.hpp"
#include "hyperlab/errors.hpp"
#include "hyperlab/group.hpp"
#include "hyperlab/metric.hpp"

namespace hyperlab {

namespace {

// ---------------------------------------------------------------------------
// Parsing

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InputError("invalid value '" + t + "' for " + std::string(key));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw InputError("value for " + std::string(key) + " must be finite");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw InputError("invalid boolean '" + t + "' for " + std::string(key));
}

// ---------------------------------------------------------------------------
// Report helpers

template <class T>
FieldValue to_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v;
  } else if constexpr (std::is_integral_v<T>) {
    return static_cast<std::int64_t>(v);
  } else if constexpr (std::is_floating_point_v<T>) {
    return static_cast<double>(v);
  } else if constexpr (std::is_same_v<T, Rational>) {
    return v;
  } else {
    return std::string(v);
  }
}

template <class T>
void put(Fields& fields, std::string key, const T& v) {
  fields.push_back(Field{std::move(key), to_value(v)});
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_words(const Group& G, std::initializer_list<std::pair<const char*, const GroupElement*>> items) {
  std::string out;
  for (const auto& [name, el] : items) {
    if (!out.empty()) out += ' ';
    out += std::string(name) + '=' + G.format(*el);
  }
  return out;
}

CheckResult named(std::string name) {
  CheckResult check;
  check.name = std::move(name);
  return check;
}

SuiteReport make_suite(std::string name, std::vector<CheckResult> checks) {
  SuiteReport suite;
  suite.suite = std::move(name);
  suite.checks = std::move(checks);
  return suite;
}

void fail(CheckResult& check, const std::string& witness) {
  if (!check.witness) check.witness = witness;
  check.passed = false;
}

// ---------------------------------------------------------------------------
// Scenario context

double ball_estimate(const Group& G, int radius) {
  const double s = static_cast<double>(G.alphabet().size());
  double total = 1.0, sphere = s;
  for (int j = 1; j <= radius; ++j) {
    total += sphere;
    sphere *= s - 1.0;
  }
  return total;
}

struct Context {
  const ScenarioConfig& cfg;
  Group group;
  std::optional<MetricStructure> metric_cache;
  std::optional<MetricStructure> green_cache;

  bool is_free() const { return group.kind() == PresentationKind::free; }

  void require_ball(int radius) const {
    if (radius < 0) throw InputError("radius must be non-negative");
    const double estimate = ball_estimate(group, radius);
    if (estimate > static_cast<double>(cfg.max_ball)) {
      throw ResourceError("a radius-" + std::to_string(radius) + " ball may hold " + format_double(estimate) +
                          " elements, above the cap of " + std::to_string(cfg.max_ball) + " (raise --max-ball)");
    }
  }

  Ball ball(int radius) const {
    require_ball(radius);
    return Ball(group, radius, BallOptions{cfg.max_ball, false});
  }

  int truncation() const {
    if (cfg.truncation > 0) return cfg.truncation;
    int T = 12;
    while (T > 6 && ball_estimate(group, T) > static_cast<double>(cfg.max_ball)) --T;
    return T;
  }

  const MetricStructure& green() {
    if (!green_cache) {
      const int T = truncation();
      require_ball(T);
      green_cache = build_green_metric(group, GreenWalk::simple(group, T));
    }
    return *green_cache;
  }

  const MetricStructure& metric() {
    if (cfg.metric == "green") return green();
    if (!metric_cache) metric_cache = MetricStructure::word(group, cfg.scale, cfg.lookup_radius);
    return *metric_cache;
  }

  double C() { return cfg.C.value_or(metric().rough_constant()); }

  void require_pairs(double pairs, const std::string& what) const {
    if (pairs > static_cast<double>(cfg.max_pairs)) {
      throw ResourceError(what + " needs " + format_double(pairs) + " pairs, above the cap of " +
                          std::to_string(cfg.max_pairs) + " (raise --max-pairs)");
    }
  }

  void require_free(const std::string& suite) const {
    if (!is_free()) throw UnsupportedError("the " + suite + " suite needs a free group (got " + group.spec() + ")");
  }
};

const std::vector<double>& default_grid() {
  static const std::vector<double> grid{1.0, 1.05, 1.1, 1.15, 1.2, 1.5, 2.0, 3.0};
  return grid;
}

// ---------------------------------------------------------------------------
// Suites

SuiteReport strong_hyp_suite(Context& ctx) {
  const auto& m = ctx.metric();
  const int radius = ctx.cfg.radius.value_or(ctx.is_free() ? 4 : 2);
  if (radius > m.lookup_radius()) {
    throw InputError("radius " + std::to_string(radius) + " exceeds the metric's range " +
                     std::to_string(m.lookup_radius()));
  }
  const auto ball = ctx.ball(radius);
  const auto report = check_strong_hyperbolicity(m, ball);
  const double tol = m.exact() ? 0.0 : 1e-6;

  auto check = named("four-point");
  put(check.fields, "metric", to_string(m.kind()));
  put(check.fields, "radius", radius);
  put(check.fields, "ball_size", ball.size());
  put(check.fields, "quadruples", report.quadruples_checked);
  put(check.fields, "max_defect", report.max_defect);
  put(check.fields, "tolerance", tol);
  if (report.max_defect > tol) {
    const auto& w = *report.witness;
    fail(check, join_words(ctx.group, {{"x", &w.x}, {"y", &w.y}, {"z", &w.z}, {"o", &w.o}}));
  }
  return make_suite("strong-hyp", {check});
}

SuiteReport green_suite(Context& ctx) {
  const auto& m = ctx.green();
  const auto* diag = m.green_diagnostics();
  const int radius = ctx.cfg.radius.value_or(std::min(4, m.lookup_radius()));
  if (radius > m.lookup_radius()) {
    throw InputError("radius " + std::to_string(radius) + " exceeds the Green query radius " +
                     std::to_string(m.lookup_radius()) + "; raise --truncation");
  }
  const auto ball = ctx.ball(radius);
  const auto& G = ctx.group;

  auto solve = named("solver");
  put(solve.fields, "truncation", diag->truncation);
  put(solve.fields, "query_radius", diag->query_radius);
  put(solve.fields, "unknowns", diag->unknowns);
  put(solve.fields, "truncation_gap", diag->truncation_gap);
  put(solve.fields, "extrapolation_error", diag->extrapolation_error);
  put(solve.fields, "rough_constant", m.rough_constant());

  SuiteReport suite{"green", "", "", {solve}};
  if (ctx.is_free()) {
    const double D = std::log(2.0 * G.free_rank() - 1.0);
    auto closed = named("closed-form");
    double worst = 0.0;
    std::size_t worst_index = 0;
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const double err = std::abs(m.length(ball.element(i)) - D * static_cast<double>(ball.element(i).size()));
      if (err > worst) {
        worst = err;
        worst_index = i;
      }
    }
    const double first_passage = std::exp(-m.length(G.generator(0)));
    put(closed.fields, "radius", radius);
    put(closed.fields, "ball_size", ball.size());
    put(closed.fields, "max_error", worst);
    put(closed.fields, "tolerance", 1e-6);
    put(closed.fields, "first_passage", first_passage);
    put(closed.fields, "first_passage_oracle", 1.0 / (2.0 * G.free_rank() - 1.0));
    if (worst > 1e-6) fail(closed, "g=" + G.format(ball.element(worst_index)));
    suite.checks.push_back(std::move(closed));
  } else {
    auto axioms = named("metric-axioms");
    // Truncation errors of the solve bound how far symmetry and the triangle
    // inequality can be off.
    const double tol = 1e-9 + 4.0 * diag->extrapolation_error;
    double worst = 0.0;
    std::uint64_t checks = 0;
    const auto inner = ctx.ball(radius / 2);
    for (const auto& g : ball.elements()) {
      ++checks;
      const double gap = std::abs(m.length(g) - m.length(G.invert(g)));
      worst = std::max(worst, gap);
      if (gap > tol) fail(axioms, "symmetry g=" + G.format(g));
    }
    for (const auto& g : inner.elements()) {
      for (const auto& h : inner.elements()) {
        ++checks;
        const auto gh = G.multiply(g, h);
        const double excess = m.length(gh) - m.length(g) - m.length(h);
        worst = std::max(worst, excess);
        if (excess > tol) {
          fail(axioms, "triangle " + join_words(G, {{"g", &g}, {"h", &h}}));
        }
      }
    }
    put(axioms.fields, "radius", radius);
    put(axioms.fields, "checks", checks);
    put(axioms.fields, "max_violation", worst);
    put(axioms.fields, "tolerance", tol);
    suite.checks.push_back(std::move(axioms));
  }
  return suite;
}

CheckResult single_element_norm(Context& ctx, const GroupElement& g) {
  const auto& m = ctx.metric();
  const double K = ctx.cfg.K, C = ctx.C();
  const double unit = m.exact() ? m.scale() : 1.0;
  const int radius =
      ctx.cfg.radius.value_or(static_cast<int>(std::ceil((m.length(g) + K + C) / unit - 1e-12)) + (m.exact() ? 0 : 2));
  ctx.require_ball(radius);
  const auto delta = build_delta(m, K, radius, C);
  ctx.require_pairs(static_cast<double>(delta.size()), "the Delta window");
  const auto ps = ctx.cfg.p.value_or(std::vector<double>{2.0});

  auto check = named("norm");
  put(check.fields, "g", ctx.group.format(g));
  put(check.fields, "pairs", delta.size());
  const bool law = m.kind() == MetricKind::tree_exact && m.scale() == 1.0 && K == 1.0 && C == 0.0;
  for (const double p : ps) {
    const auto r = lp_norm(g, delta, p);
    const double count_bound = (m.length(g) - (K + C)) / K;
    const auto n = static_cast<std::int64_t>(std::max(0.0, std::ceil(count_bound - 1e-12)));
    const double lower = std::pow(K - 2.0 * C, p) * static_cast<double>(n);
    Fields rec;
    put(rec, "p", r.p);
    put(rec, "K", r.K);
    put(rec, "C", r.C);
    put(rec, "radius", r.radius);
    put(rec, "norm_p", r.norm_p);
    put(rec, "tail_bound", r.tail_bound);
    put(rec, "n", n);
    put(rec, "lower_bound", lower);
    if (r.exact_norm_p) put(rec, "norm_p_exact", *r.exact_norm_p);
    put(rec, "tail_basis", r.tail_basis);
    if (r.norm_p < lower - 1e-9) fail(check, "g=" + ctx.group.format(g) + " p=" + format_double(p));
    if (law) {
      const double expected = 2.0 * static_cast<double>(g.size());
      const bool ok = r.exact_norm_p ? *r.exact_norm_p == Rational(static_cast<std::int64_t>(2 * g.size()))
                                     : std::abs(r.norm_p - expected) <= 1e-9 * std::max(1.0, expected);
      put(rec, "norm_law", ok);
      if (!ok) fail(check, "norm law g=" + ctx.group.format(g) + " p=" + format_double(p));
    }
    check.records.push_back(std::move(rec));
  }
  return check;
}

SuiteReport cocycle_suite(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& G = ctx.group;
  const auto& m = ctx.metric();
  const double K = cfg.K, C = ctx.C();
  if (!(K > 2.0 * C)) throw InputError("the cocycle suite needs K > 2C");
  SuiteReport suite{"cocycle", "", "", {}};

  if (cfg.element) {
    suite.checks.push_back(single_element_norm(ctx, G.element(*cfg.element)));
    return suite;
  }

  // Norm law on the tree.
  if (m.kind() == MetricKind::tree_exact && m.scale() == 1.0 && K == 1.0 && C == 0.0) {
    const int radius = cfg.radius.value_or(4);
    const auto elements = ctx.ball(radius);
    ctx.require_ball(radius + 2);
    const auto delta = build_delta(m, K, radius + 2, C);
    const auto ps = cfg.p.value_or(std::vector<double>{1.0, 2.0, 3.0});
    auto law = named("norm-law");
    std::uint64_t checks = 0;
    for (const auto& g : elements.elements()) {
      for (const double p : ps) {
        ++checks;
        const auto r = lp_norm(g, delta, p);
        const auto expected = static_cast<std::int64_t>(2 * g.size());
        const bool ok = r.tail_bound == 0.0 &&
                        (r.exact_norm_p ? *r.exact_norm_p == Rational(expected)
                                        : std::abs(r.norm_p - static_cast<double>(expected)) <= 1e-9 * (1.0 + expected));
        if (!ok) fail(law, "g=" + G.format(g) + " p=" + format_double(p) + " norm_p=" + format_double(r.norm_p));
      }
    }
    put(law.fields, "radius", radius);
    put(law.fields, "window", radius + 2);
    put(law.fields, "checks", checks);
    suite.checks.push_back(std::move(law));
  }

  // Cocycle identity.
  ctx.require_ball(cfg.window);
  const auto delta = build_delta(m, K, cfg.window, C);
  ctx.require_pairs(static_cast<double>(delta.size()), "the Delta window");
  const auto elements = ctx.ball(cfg.elements);
  {
    const auto r = check_cocycle_identity(delta, elements);
    auto check = named("cocycle-identity");
    put(check.fields, "K", K);
    put(check.fields, "C", C);
    put(check.fields, "window", cfg.window);
    put(check.fields, "elements", cfg.elements);
    put(check.fields, "pairs", delta.size());
    put(check.fields, "checks", r.checks);
    put(check.fields, "failures", r.failures);
    put(check.fields, "antisymmetry_failures", r.antisymmetry_failures);
    put(check.fields, "coboundary_failures", r.coboundary_failures);
    if (!r.passed()) fail(check, r.witness.value_or("unreported"));
    suite.checks.push_back(std::move(check));
  }

  // Affine action on seeded finitely supported vectors.
  if (m.exact()) {
    std::mt19937_64 rng(cfg.seed);
    const int inner = std::max(0, cfg.window - cfg.elements);
    std::vector<DeltaVector> phis;
    for (int v = 0; v < 3; ++v) {
      DeltaVector phi(delta.size(), Rational(0));
      for (std::size_t k = 0; k < delta.size(); ++k) {
        if (delta.ball().length(delta.pairs()[k].first) <= inner && delta.ball().length(delta.pairs()[k].second) <= inner) {
          phi[k] = Rational(static_cast<std::int64_t>(rng() % 7) - 3, static_cast<std::int64_t>(rng() % 3) + 1);
        }
      }
      phis.push_back(std::move(phi));
    }
    const double p = cfg.p ? cfg.p->front() : 2.0;
    const auto r = affine_action_check(elements.elements(), phis, delta, p);
    auto check = named("affine-action");
    put(check.fields, "p", p);
    put(check.fields, "vectors", phis.size());
    put(check.fields, "compositions_checked", r.compositions_checked);
    put(check.fields, "composition_failures", r.composition_failures);
    put(check.fields, "isometry_checks", r.isometry_checks);
    put(check.fields, "isometry_failures", r.isometry_failures);
    if (!r.passed()) fail(check, "seed=" + std::to_string(cfg.seed) + " " + r.witness.value_or("unreported"));
    suite.checks.push_back(std::move(check));
  }

  // Summability threshold.
  {
    const int radius = ctx.is_free() ? 6 : 3;
    ctx.require_ball(radius);
    const auto scan_delta = build_delta(m, K, radius, C);
    ctx.require_pairs(static_cast<double>(scan_delta.size()), "the summability scan");
    const auto ps = cfg.p.value_or(default_grid());
    const auto scan = critical_exponent_scan(scan_delta, ps);
    const bool exact_law = m.kind() == MetricKind::tree_exact && K == 1.0 && C == 0.0;
    const double threshold = exact_law ? std::log(2.0 * G.free_rank() - 1.0) / m.scale()
                                       : std::numeric_limits<double>::quiet_NaN();
    auto check = named("summability");
    put(check.fields, "radius", radius);
    put(check.fields, "threshold", threshold);
    put(check.fields, "zero_product_pairs", scan.zero_product_pairs);
    for (const auto& row : scan.rows) {
      Fields rec;
      put(rec, "p", row.p);
      put(rec, "ratio", row.ratio);
      put(rec, "predicted_ratio", row.predicted_ratio);
      put(rec, "converges", row.converges);
      if (exact_law) {
        const bool ok = std::abs(row.ratio - row.predicted_ratio) <= 1e-9 * row.predicted_ratio &&
                        row.converges == (row.p > threshold);
        if (!ok) fail(check, "p=" + format_double(row.p));
      }
      check.records.push_back(std::move(rec));
    }
    suite.checks.push_back(std::move(check));
  }
  return suite;
}

SuiteReport properness_suite(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& G = ctx.group;
  const auto& m = ctx.metric();
  const double K = cfg.K, C = ctx.C();
  if (!(K > 2.0 * C)) throw InputError("the properness suite needs K > 2C");
  const int radius = cfg.radius.value_or(ctx.is_free() ? 6 : 3);
  const auto elements = ctx.ball(radius);
  const auto delta = build_delta(m, K, radius, C);
  ctx.require_pairs(static_cast<double>(delta.size()), "the Delta window");
  const auto ps = cfg.p.value_or(std::vector<double>{1.0});
  const bool unit_case = K == 1.0 && C == 0.0 && m.exact() && m.scale() == 1.0;

  auto check = named("certificates");
  std::uint64_t certificates = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& g : elements.elements()) {
    if (g.empty()) continue;
    for (const double p : ps) {
      ++certificates;
      const std::string where = "g=" + G.format(g) + " p=" + format_double(p);
      try {
        const auto cert = properness_check(g, delta, p);
        min_margin = std::min(min_margin, cert.norm.norm_p - cert.lower_bound);
        if (!cert.verified) fail(check, where + " n=" + std::to_string(cert.n));
        if (unit_case && cert.n < static_cast<int>(g.size()) - 1) fail(check, where + " n=" + std::to_string(cert.n));
      } catch (const InvariantViolation& e) {
        fail(check, where + " " + e.what());
      }
    }
  }
  put(check.fields, "K", K);
  put(check.fields, "C", C);
  put(check.fields, "radius", radius);
  put(check.fields, "certificates", certificates);
  put(check.fields, "min_margin", min_margin);
  return make_suite("properness", {check});
}

SuiteReport boundary_suite(Context& ctx) {
  ctx.require_free("boundary");
  const auto& cfg = ctx.cfg;
  const auto& G = ctx.group;
  const int radius = cfg.radius.value_or(3);
  const auto ball = ctx.ball(radius);

  auto conf = named("conformality");
  std::uint64_t cylinders_checked = 0;
  for (const auto& g : ball.elements()) {
    if (g.empty()) continue;
    const int depth = std::max(static_cast<int>(g.size()) + 1, cfg.depth.value_or(0));
    const auto r = conformality_check(G, g, depth);
    cylinders_checked += r.cylinders_checked;
    for (const auto& rec : r.records) {
      if (!rec.passed) {
        fail(conf, "g=" + G.format(g) + " cylinder=" + G.alphabet().format(rec.cylinder) +
                       " ratio=" + to_string(rec.ratio));
      }
    }
  }
  put(conf.fields, "radius", radius);
  put(conf.fields, "cylinders", cylinders_checked);

  auto ident = named("conformal-identity");
  std::mt19937_64 rng(cfg.seed);
  const auto points = seeded_points(G, 64, cfg.seed);
  const int triples = 200;
  for (int t = 0; t < triples; ++t) {
    const auto& g = ball.element(rng() % ball.size());
    const auto i = rng() % points.size();
    auto j = rng() % points.size();
    if (j == i) j = (j + 1) % points.size();
    const auto r = conformal_identity_check(G, g, points[i], points[j]);
    if (!r.passed) {
      fail(ident, "seed=" + std::to_string(cfg.seed) + " triple=" + std::to_string(t) + " g=" + G.format(g) +
                      " xi=" + format(G, points[i]) + " eta=" + format(G, points[j]));
    }
  }
  put(ident.fields, "seed", cfg.seed);
  put(ident.fields, "triples", triples);
  return make_suite("boundary", {conf, ident});
}

SuiteReport kms_suite(Context& ctx) {
  ctx.require_free("kms");
  const auto& cfg = ctx.cfg;
  const auto& G = ctx.group;
  const int radius = cfg.radius.value_or(2);
  const int depth = cfg.depth.value_or(3);
  if (depth < 0) throw InputError("depth must be non-negative");
  const double monomials = ball_estimate(G, radius) * static_cast<double>(cylinder_count(G.free_rank(), depth));
  ctx.require_pairs(monomials * monomials, "the KMS scan");
  const double D = boundary_dimension(G);
  const BoundaryMeasure mu{G.free_rank()};
  SuiteReport suite{"kms", "", "", {}};

  {
    const Word a{0};
    const auto A = CrossedElement::monomial(StepFunction::indicator(G, a), G.generator(0));
    const auto B = CrossedElement::monomial(StepFunction::indicator(G, Word{0, 0}), G.invert(G.generator(0)));
    const auto r = kms_check(A, B, D, mu);
    const auto oracle = cylinder_measure(mu, G, Word{0, 0, 0});
    auto check = named("worked-instance");
    put(check.fields, "lhs", r.lhs);
    put(check.fields, "rhs", r.rhs);
    put(check.fields, "oracle", oracle);
    if (!r.equal || r.lhs != oracle) fail(check, "A=1_{C_a} a B=1_{C_aa} a^-1");
    suite.checks.push_back(std::move(check));
  }

  auto scan_fields = [](CheckResult& check, const KmsScanReport& s) {
    put(check.fields, "beta", s.beta);
    put(check.fields, "multiple", s.multiple);
    put(check.fields, "radius", s.radius);
    put(check.fields, "depth", s.depth);
    put(check.fields, "pairs", s.pairs_checked);
    put(check.fields, "paired_terms", s.paired_terms);
    put(check.fields, "unequal_pairs", s.unequal_pairs);
  };
  auto describe = [&](const KmsWitness& w) {
    return "A=1_{C_" + G.alphabet().format(w.cylinder_a) + "} " + G.format(w.g) + " B=1_{C_" +
           G.alphabet().format(w.cylinder_b) + "} " + G.format(w.h) + " lhs=" + to_string(w.report.lhs) +
           " rhs=" + to_string(w.report.rhs);
  };
  {
    const auto s = kms_scan(G, radius, depth, D);
    auto check = named("kms-at-dimension");
    scan_fields(check, s);
    if (!s.all_equal()) fail(check, describe(*s.first_unequal));
    suite.checks.push_back(std::move(check));
  }
  {
    const auto s = kms_scan(G, radius, depth, 2.0 * D);
    auto check = named("temperature-sensitivity");
    scan_fields(check, s);
    if (s.first_unequal) {
      put(check.fields, "example", describe(*s.first_unequal));
    } else {
      fail(check, "no unequal pair at beta = 2D");
    }
    suite.checks.push_back(std::move(check));
  }
  {
    const auto r = nonvanishing_certificate(ctx.ball(radius + 1));
    auto check = named("non-vanishing");
    put(check.fields, "radius", radius + 1);
    put(check.fields, "elements", r.records.size());
    put(check.fields, "failures", r.failures);
    put(check.fields, "note", r.note);
    for (const auto& rec : r.records) {
      if (!rec.passed) fail(check, "g=" + G.format(rec.g));
    }
    suite.checks.push_back(std::move(check));
  }
  return suite;
}

using SuiteFn = SuiteReport (*)(Context&);

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table{
      {"strong-hyp", strong_hyp_suite}, {"green", green_suite},       {"cocycle", cocycle_suite},
      {"properness", properness_suite}, {"boundary", boundary_suite}, {"kms", kms_suite},
  };
  return table;
}

// ---------------------------------------------------------------------------
// Emission

using nlohmann::ordered_json;

ordered_json json_value(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(x)) return format_double(x);
          return std::strtod(format_double(x).c_str(), nullptr);
        } else if constexpr (std::is_same_v<T, Rational>) {
          return to_string(x);
        } else {
          return x;
        }
      },
      v);
}

std::string text_value(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, Rational>) {
          return to_string(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return std::to_string(x);
        }
      },
      v);
}

ordered_json json_fields(const Fields& fields) {
  ordered_json out = ordered_json::object();
  for (const auto& f : fields) out[f.key] = json_value(f.value);
  return out;
}

ordered_json json_config(const ScenarioConfig& cfg) {
  ordered_json c = ordered_json::object();
  auto opt = [](const auto& o) -> ordered_json { return o ? ordered_json(*o) : ordered_json(nullptr); };
  c["suite"] = cfg.suite;
  c["group"] = cfg.group;
  c["metric"] = cfg.metric;
  c["scale"] = cfg.scale;
  c["lookup_radius"] = cfg.lookup_radius;
  c["truncation"] = cfg.truncation > 0 ? ordered_json(cfg.truncation) : ordered_json(nullptr);
  c["radius"] = opt(cfg.radius);
  c["K"] = cfg.K;
  c["C"] = opt(cfg.C);
  c["p"] = opt(cfg.p);
  c["depth"] = opt(cfg.depth);
  c["window"] = cfg.window;
  c["elements"] = cfg.elements;
  c["g"] = opt(cfg.element);
  c["seed"] = cfg.seed;
  c["max_ball"] = cfg.max_ball;
  c["max_pairs"] = cfg.max_pairs;
  return c;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : suite_table()) out.push_back(name);
    out.push_back("all");
    return out;
  }();
  return names;
}

std::vector<double> parse_p_list(std::string_view text) {
  const auto t = trim(text);
  if (t == "grid") return default_grid();
  std::vector<double> out;
  std::stringstream in(t);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<double>("p", item));
  if (out.empty()) throw InputError("p needs at least one value");
  return out;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key_in, std::string_view value_in) {
  const auto key = trim(key_in);
  const auto value = trim(value_in);
  if (key == "suite") {
    cfg.suite = value;
  } else if (key == "group") {
    cfg.group = value;
  } else if (key == "metric") {
    cfg.metric = value;
  } else if (key == "scale") {
    cfg.scale = parse_number<double>(key, value);
  } else if (key == "lookup_radius") {
    cfg.lookup_radius = parse_number<int>(key, value);
  } else if (key == "truncation") {
    cfg.truncation = parse_number<int>(key, value);
  } else if (key == "radius") {
    cfg.radius = parse_number<int>(key, value);
  } else if (key == "K") {
    cfg.K = parse_number<double>(key, value);
  } else if (key == "C") {
    cfg.C = parse_number<double>(key, value);
  } else if (key == "p") {
    cfg.p = parse_p_list(value);
  } else if (key == "depth") {
    cfg.depth = parse_number<int>(key, value);
  } else if (key == "window") {
    cfg.window = parse_number<int>(key, value);
  } else if (key == "elements") {
    cfg.elements = parse_number<int>(key, value);
  } else if (key == "g") {
    cfg.element = value;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "max_ball") {
    cfg.max_ball = parse_number<std::size_t>(key, value);
  } else if (key == "max_pairs") {
    cfg.max_pairs = parse_number<std::uint64_t>(key, value);
  } else if (key == "timing") {
    cfg.timing = parse_bool(key, value);
  } else {
    throw InputError("unknown setting '" + key + "'");
  }
}

void load_config_file(ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    try {
      apply_setting(cfg, std::string_view(t).substr(0, eq), std::string_view(t).substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("error while reading " + path);
}

void validate(const ScenarioConfig& cfg) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end()) {
    throw InputError("unknown suite '" + cfg.suite + "'");
  }
  if (cfg.metric != "word" && cfg.metric != "green") throw InputError("metric must be word or green");
  if (cfg.format != "json" && cfg.format != "csv") throw InputError("format must be json or csv");
  if (!(cfg.scale > 0.0)) throw InputError("scale must be positive");
  if (!(cfg.K > 0.0)) throw InputError("K must be positive");
  if (cfg.C && !(*cfg.C >= 0.0)) throw InputError("C must be non-negative");
  if (cfg.C && (cfg.suite == "cocycle" || cfg.suite == "properness" || cfg.suite == "all") && !(cfg.K > 2.0 * *cfg.C)) {
    throw InputError("K must exceed 2C");
  }
  if (cfg.radius && *cfg.radius < 0) throw InputError("radius must be non-negative");
  if (cfg.depth && *cfg.depth < 0) throw InputError("depth must be non-negative");
  if (cfg.window < 0 || cfg.elements < 0) throw InputError("window and elements must be non-negative");
  if (cfg.lookup_radius < 1) throw InputError("lookup_radius must be positive");
  if (cfg.truncation != 0 && cfg.truncation < 6) throw InputError("truncation must be at least 6");
  if (cfg.p) {
    for (const double p : *cfg.p) {
      if (!(p >= 1.0)) throw InputError("p values must be at least 1");
    }
  }
}

bool ScenarioReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.status != "fail"; });
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  Context ctx{cfg, Group::from_spec(cfg.group), std::nullopt, std::nullopt};
  ScenarioReport report;
  report.config = cfg;
  for (const auto& [name, fn] : suite_table()) {
    if (cfg.suite != "all" && cfg.suite != name) continue;
    const auto start = std::chrono::steady_clock::now();
    SuiteReport suite;
    try {
      suite = fn(ctx);
    } catch (const UnsupportedError& e) {
      if (cfg.suite != "all") throw;
      suite = make_suite(name, {});
      suite.status = "skipped";
      suite.reason = e.what();
    }
    if (suite.status != "skipped") {
      const bool ok = std::all_of(suite.checks.begin(), suite.checks.end(), [](const auto& c) { return c.passed; });
      suite.status = ok ? "pass" : "fail";
    }
    suite.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.suites.push_back(std::move(suite));
  }
  return report;
}

void emit_report(const ScenarioReport& report, std::string_view format, std::ostream& out) {
  const bool timing = report.config.timing;
  if (format == "json") {
    ordered_json doc = ordered_json::object();
    doc["schema"] = "1";
    doc["tool"] = "hyperlab";
    doc["config"] = json_config(report.config);
    doc["passed"] = report.passed();
    doc["suites"] = ordered_json::array();
    for (const auto& s : report.suites) {
      ordered_json js = ordered_json::object();
      js["suite"] = s.suite;
      js["status"] = s.status;
      if (!s.reason.empty()) js["reason"] = s.reason;
      if (timing) js["duration_ms"] = json_value(s.duration_ms);
      js["checks"] = ordered_json::array();
      for (const auto& c : s.checks) {
        ordered_json jc = ordered_json::object();
        jc["name"] = c.name;
        jc["passed"] = c.passed;
        jc["fields"] = json_fields(c.fields);
        if (!c.records.empty()) {
          jc["records"] = ordered_json::array();
          for (const auto& r : c.records) jc["records"].push_back(json_fields(r));
        }
        if (c.witness) jc["witness"] = *c.witness;
        js["checks"].push_back(std::move(jc));
      }
      doc["suites"].push_back(std::move(js));
    }
    out << doc.dump(2) << '\n';
  } else if (format == "csv") {
    out << "suite,check,passed,item,field,value\n";
    auto row = [&](const std::string& suite, const std::string& check, const std::string& passed,
                   const std::string& item, const std::string& field, const std::string& value) {
      out << csv_escape(suite) << ',' << csv_escape(check) << ',' << passed << ',' << item << ',' << csv_escape(field)
          << ',' << csv_escape(value) << '\n';
    };
    for (const auto& s : report.suites) {
      row(s.suite, "", s.status, "", "status", s.status);
      if (!s.reason.empty()) row(s.suite, "", s.status, "", "reason", s.reason);
      if (timing) row(s.suite, "", s.status, "", "duration_ms", format_double(s.duration_ms));
      for (const auto& c : s.checks) {
        const std::string passed = c.passed ? "true" : "false";
        for (const auto& f : c.fields) row(s.suite, c.name, passed, "", f.key, text_value(f.value));
        for (std::size_t i = 0; i < c.records.size(); ++i) {
          for (const auto& f : c.records[i]) row(s.suite, c.name, passed, std::to_string(i), f.key, text_value(f.value));
        }
        if (c.witness) row(s.suite, c.name, passed, "", "witness", *c.witness);
      }
    }
  } else {
    throw InputError("format must be json or csv");
  }
  if (!out) throw IoError("failed to write the report");
}

int exit_code(const ScenarioReport& report) { return report.passed() ? 0 : 1; }

}  // namespace hyperlab
