#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "hyperlab/ball.hpp"
#include "hyperlab/boundary.hpp"
#include "hyperlab/cocycles.hpp"
#include "hyperlab/crossed_product.hpp"
#include "hyperlab/errors.hpp"
#include "hyperlab/harness.hpp"
#include "hyperlab/metric.hpp"

using namespace hyperlab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const Group& F2() {
  static const Group g = Group::free(2);
  return g;
}

Outcome strong_hyperbolicity() {
  const auto start = std::chrono::steady_clock::now();
  const auto m = MetricStructure::word(F2());
  const Ball ball(F2(), 4);
  const auto report = check_strong_hyperbolicity(m, ball);
  const double t = seconds_since(start);
  const bool ok = m.kind() == MetricKind::tree_exact && report.max_defect == 0.0 && !report.witness &&
                  report.quadruples_checked == 161ULL * 161 * 161 * 161 && t < 30.0;
  return {ok, "defect " + fmt(report.max_defect) + " over " + std::to_string(report.quadruples_checked) +
                  " quadruples in " + fmt(t) + " s"};
}

Outcome green_closed_form() {
  // Smallest root of (2k-1)F^2 - 2kF + 1 = 0 with k = 2.
  const double root = (4.0 - std::sqrt(16.0 - 12.0)) / 6.0;
  const double unit = -std::log(root);
  const auto g = build_green_metric(F2(), GreenWalk::simple(F2(), 12));
  const auto tree = MetricStructure::word(F2());
  const Ball ball(F2(), 4);
  double worst = 0.0;
  for (const auto& x : ball.elements()) {
    for (const auto& y : ball.elements()) {
      const double expected = unit * static_cast<double>(tree.word_distance(x, y));
      worst = std::max(worst, std::abs(g.distance(x, y) - expected));
    }
  }
  const bool ok = std::abs(root - 1.0 / 3.0) < 1e-15 && std::abs(unit - std::log(3.0)) < 1e-15 && worst <= 1e-6;
  return {ok, "max |d_G - log3 d| = " + fmt(worst) + " on " + std::to_string(ball.size() * ball.size()) + " pairs"};
}

Outcome norm_law() {
  const auto m = MetricStructure::word(F2());
  const auto delta = build_delta(m, 1.0, 5, 0.0);
  const Ball ball(F2(), 4);
  std::size_t failures = 0;
  for (const auto& g : ball.elements()) {
    const Rational expected(2 * static_cast<std::int64_t>(g.size()));
    for (int p : {1, 2, 3}) {
      const auto r = lp_norm(g, delta, p);
      if (!r.exact_norm_p || *r.exact_norm_p != expected || r.tail_bound != 0.0) ++failures;
    }
  }
  return {failures == 0, std::to_string(ball.size()) + " elements x p in {1,2,3}, " + std::to_string(failures) +
                             " failures"};
}

Outcome cocycle_identity() {
  const auto free_delta = build_delta(MetricStructure::word(F2()), 1.0, 3);
  const auto free_report = check_cocycle_identity(free_delta, Ball(F2(), 2));
  const auto S = Group::surface(2);
  const auto surface_delta = build_delta(MetricStructure::word(S, 1.0, 7), 3.0, 3);
  const auto surface_report = check_cocycle_identity(surface_delta, Ball(S, 2));
  const bool ok = free_report.passed() && surface_report.passed() && free_report.checks > 0 &&
                  surface_report.checks > 0;
  return {ok, "free:2 " + std::to_string(free_report.checks) + " checks, surface:2 " +
                  std::to_string(surface_report.checks) + " checks, failures " +
                  std::to_string(free_report.failures + surface_report.failures)};
}

Outcome properness() {
  const auto delta = build_delta(MetricStructure::word(F2()), 1.0, 6, 0.0);
  const Ball ball(F2(), 6);
  std::size_t failures = 0;
  for (const auto& g : ball.elements()) {
    const auto cert = properness_check(g, delta, 1.0);
    const double required = cert.n;  // (K - 2C)^p n with K = 1, C = 0
    const bool ok = cert.verified && cert.n >= static_cast<int>(g.size()) - 1 && cert.norm.norm_p >= required &&
                    cert.lower_bound == required;
    if (!ok) ++failures;
  }
  return {failures == 0, std::to_string(ball.size()) + " certificates, " + std::to_string(failures) + " failures"};
}

Outcome summability() {
  const auto delta = build_delta(MetricStructure::word(F2()), 1.0, 6, 0.0);
  const std::vector<double> ps = {1.0, 1.05, 1.0986, 1.0987, 1.1, 1.5, 2.0, 3.0};
  const auto scan = critical_exponent_scan(delta, ps);
  // Sphere-count oracle: the increment at radius m is proportional to |S_m| e^{-p m}.
  const Ball ball(F2(), 6);
  std::vector<double> sphere(7, 0.0);
  for (const auto& x : ball.elements()) sphere[x.size()] += 1.0;
  std::size_t failures = 0;
  for (const auto& row : scan.rows) {
    const double oracle = sphere[6] / sphere[5] * std::exp(-row.p);
    if (std::abs(row.ratio - oracle) > 1e-12 * oracle) ++failures;
    if (std::abs(oracle - 3.0 * std::exp(-row.p)) > 1e-12) ++failures;
    if (row.converges != (row.p > std::log(3.0))) ++failures;
  }
  return {failures == 0 && scan.rows.size() == ps.size(),
          std::to_string(scan.rows.size()) + " exponents, threshold log 3 = " + fmt(std::log(3.0)) + ", " +
              std::to_string(failures) + " failures"};
}

Outcome conformality() {
  const auto start = std::chrono::steady_clock::now();
  const Ball ball(F2(), 3);
  std::size_t failures = 0, cylinders = 0;
  for (const auto& g : ball.elements()) {
    if (g.empty()) continue;
    const auto report = conformality_check(F2(), g, static_cast<int>(g.size()) + 1);
    failures += report.failures;
    cylinders += report.cylinders_checked;
  }
  const double t = seconds_since(start);
  return {failures == 0 && cylinders > 0 && t < 10.0,
          std::to_string(cylinders) + " cylinders, " + std::to_string(failures) + " failures in " + fmt(t) + " s"};
}

Outcome conformal_identity() {
  std::mt19937_64 rng(7);
  const Ball ball(F2(), 4);
  const auto family = seeded_points(F2(), 64, 7);
  std::size_t failures = 0;
  for (int t = 0; t < 200; ++t) {
    const auto& g = ball.element(rng() % ball.size());
    const auto& xi = family[rng() % family.size()];
    auto eta = family[rng() % family.size()];
    if (eta == xi) eta = act(F2(), F2().element("b"), xi);
    const auto r = conformal_identity_check(F2(), g, xi, eta);
    // Direct evaluation of the right-hand side.
    const auto ginv = F2().invert(g);
    const auto products = boundary_gromov(F2(), xi, eta);
    const std::int64_t rhs = -busemann_boundary(F2(), ginv, xi) - busemann_boundary(F2(), ginv, eta) +
                             2 * products.value;
    const auto lhs = boundary_gromov(F2(), act(F2(), g, xi), act(F2(), g, eta));
    if (!r.passed || r.lhs != 2 * lhs.value || r.rhs != rhs || r.lhs != r.rhs) ++failures;
  }
  return {failures == 0, "200 triples, " + std::to_string(failures) + " failures"};
}

Outcome kms() {
  const double D = std::log(3.0);
  const BoundaryMeasure mu{2};
  const auto& F = F2();
  const auto A = CrossedElement::monomial(StepFunction::indicator(F, F.alphabet().parse("a")), F.element("a"));
  const auto B = CrossedElement::monomial(StepFunction::indicator(F, F.alphabet().parse("aa")), F.element("a'"));
  // AB = 1_{C_a} 1_{C_aaa}, so omega(AB) = mu(C_aaa).
  const Rational oracle = cylinder_measure(mu, F, F.alphabet().parse("aaa"));
  const auto worked = kms_check(A, B, D, mu);
  const auto at_d = kms_scan(F, 2, 3, D);
  const auto at_2d = kms_scan(F, 2, 3, D + std::log(3.0));
  const std::uint64_t monomials = 17ULL * cylinder_count(2, 3);
  const bool ok = oracle == Rational(1, 36) && worked.lhs == oracle && worked.rhs == oracle && at_d.all_equal() &&
                  at_d.pairs_checked == monomials * monomials && at_2d.unequal_pairs > 0;
  return {ok, std::to_string(at_d.pairs_checked) + " pairs equal at D, worked instance " +
                  std::to_string(worked.lhs.numerator()) + "/" + std::to_string(worked.lhs.denominator()) + ", " +
                  std::to_string(at_2d.unequal_pairs) + " unequal pairs at D + log 3"};
}

/// Cyclically reduced core length of a reduced free word.
std::int64_t core_length(const Group& F, const Word& w) {
  std::size_t i = 0, j = w.size();
  while (j - i >= 2 && w[i] == F.alphabet().inverse(w[j - 1])) {
    ++i;
    --j;
  }
  return static_cast<std::int64_t>(j - i);
}

Outcome nonvanishing() {
  const Ball ball(F2(), 3);
  const auto report = nonvanishing_certificate(ball);
  std::size_t failures = 0;
  for (const auto& rec : report.records) {
    const auto core = core_length(F2(), rec.g.word);
    if (core <= 0 || rec.at_attracting != core || rec.at_repelling != -rec.at_attracting || !rec.passed) ++failures;
  }
  const bool ok = report.passed() && failures == 0 && report.records.size() == ball.size() - 1;
  return {ok, std::to_string(report.records.size()) + " elements, " + std::to_string(failures) + " failures"};
}

Outcome affine_action() {
  const auto delta = build_delta(MetricStructure::word(F2()), 1.0, 3, 0.0);
  const Ball gs(F2(), 2);
  std::mt19937_64 rng(7);
  std::vector<DeltaVector> phis;
  for (int v = 0; v < 3; ++v) {
    DeltaVector phi(delta.size(), Rational(0));
    for (std::size_t k = 0; k < delta.size(); ++k) {
      if (delta.x(k).size() <= 1 && delta.y(k).size() <= 1) {
        phi[k] = Rational(static_cast<std::int64_t>(rng() % 7) - 3, static_cast<std::int64_t>(rng() % 3) + 1);
      }
    }
    phis.push_back(phi);
  }
  std::size_t failures = 0;
  std::uint64_t compositions = 0;
  for (int p : {1, 2}) {
    const auto r = affine_action_check(gs.elements(), phis, delta, p);
    if (!r.passed() || r.isometry_checks == 0) ++failures;
    compositions += r.compositions_checked;
  }
  return {failures == 0, std::to_string(compositions) + " composition checks, " + std::to_string(failures) +
                             " failures"};
}

std::string run_cli(const std::string& cli, const std::string& out) {
  const std::string cmd = "\"" + cli + "\" check --suite all --group free:2 --seed 7 --out \"" + out + "\"";
  if (std::system(cmd.c_str()) != 0) return {};
  std::ifstream in(out, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  if (!cli.empty()) {
    const auto first = run_cli(cli, "acceptance_run1.json");
    const auto second = run_cli(cli, "acceptance_run2.json");
    std::remove("acceptance_run1.json");
    std::remove("acceptance_run2.json");
    return {!first.empty() && first == second, std::to_string(first.size()) + " bytes per report, identical: " +
                                                   (first == second ? "yes" : "no")};
  }
  ScenarioConfig cfg;
  cfg.group = "free:2";
  cfg.seed = 7;
  std::ostringstream a, b;
  emit_report(run_scenario(cfg), "json", a);
  emit_report(run_scenario(cfg), "json", b);
  return {a.str() == b.str(), std::to_string(a.str().size()) + " bytes per in-process report"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"strong hyperbolicity on B_4", strong_hyperbolicity},
      {"Green metric closed form", green_closed_form},
      {"Haagerup norm law", norm_law},
      {"cocycle identity", cocycle_identity},
      {"properness certificates", properness},
      {"summability threshold", summability},
      {"conformality", conformality},
      {"conformal metric identity", conformal_identity},
      {"KMS condition", kms},
      {"non-vanishing at fixed points", nonvanishing},
      {"affine action axioms", affine_action},
      {"determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.passed) ++failed;
    std::cout << "criterion " << (i + 1) << " [" << (outcome.passed ? "PASS" : "FAIL") << "] " << criteria[i].first
              << ": " << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
