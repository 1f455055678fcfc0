#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hyperlab/errors.hpp"
#include "hyperlab/metric.hpp"

using namespace hyperlab;

namespace {

std::size_t common_prefix(const Word& a, const Word& b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

/// Smallest root of (2k-1)F^2 - 2kF + 1 = 0.
double first_passage_root(int k) {
  const double a = 2.0 * k - 1.0, b = -2.0 * k, c = 1.0;
  return (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
}

}  // namespace

TEST_CASE("word distances and Gromov products") {
  const auto F = Group::free(2);
  const auto m = MetricStructure::word(F);
  CHECK(m.kind() == MetricKind::tree_exact);
  CHECK(m.word_distance(F.element("a"), F.element("ab")) == 1);
  CHECK(m.word_distance(F.identity(), F.element("aba'")) == 3);
  CHECK(m.gromov_product_x2(F.element("ab"), F.element("ab'")) == 2);
  CHECK(m.gromov_product(F.element("ab"), F.element("ab'")) == 1.0);
  const auto x = F.element("ab'a");
  CHECK(m.gromov_product_x2(x, x) == 2 * 3);
  CHECK(m.gromov_product_x2(F.identity(), x) == 0);
}

TEST_CASE("tree Gromov product is the common prefix on the radius-4 ball") {
  const auto F = Group::free(2);
  const auto m = MetricStructure::word(F);
  const Ball ball(F, 4);
  for (const auto& x : ball.elements()) {
    for (const auto& y : ball.elements()) {
      const auto twice = m.gromov_product_x2(x, y);
      CHECK(twice == 2 * static_cast<std::int64_t>(common_prefix(x.word, y.word)));
      CHECK(twice >= 0);
      CHECK(twice <= 2 * static_cast<std::int64_t>(std::min(x.size(), y.size())));
    }
  }
}

TEST_CASE("equivariance on the radius-2 ball") {
  for (const auto& G : {Group::free(2), Group::surface(2), Group::modular()}) {
    const auto m = MetricStructure::word(G);
    const Ball ball(G, 2);
    std::size_t failures = 0;
    for (const auto& g : ball.elements()) {
      for (const auto& x : ball.elements()) {
        for (const auto& y : ball.elements()) {
          if (m.word_distance(G.multiply(g, x), G.multiply(g, y)) != m.word_distance(x, y)) ++failures;
        }
      }
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("surface lengths beyond the lookup radius are refused") {
  const auto S = Group::surface(2);
  const auto m = MetricStructure::word(S, 1.0, 2);
  CHECK(m.word_length(S.element("ab")) == 2);
  CHECK_THROWS_AS(m.word_length(S.element("abc")), ResourceError);
  const auto full = MetricStructure::word(S, 1.0, 4);
  CHECK(full.word_length(S.element("a b a' b' c d")) == 2);  // (c d c' d')^-1 ... = d' c' reversed
}

TEST_CASE("strong hyperbolicity of the free tree metric") {
  const auto F = Group::free(2);
  const auto m = MetricStructure::word(F);
  const Ball ball(F, 4);
  const auto report = check_strong_hyperbolicity(m, ball);
  CHECK(report.max_defect == 0.0);
  CHECK_FALSE(report.witness);
  CHECK(report.quadruples_checked == 161ULL * 161 * 161 * 161);

  // Oracle: the tree min-inequality <x,y>_o >= min(<x,z>_o, <z,y>_o) on every quadruple.
  const Ball small(F, 2);
  std::size_t violations = 0;
  for (const auto& o : small.elements()) {
    for (const auto& x : small.elements()) {
      for (const auto& y : small.elements()) {
        for (const auto& z : small.elements()) {
          auto gp = [&](const GroupElement& p, const GroupElement& q) {
            return m.word_distance(o, p) + m.word_distance(o, q) - m.word_distance(p, q);
          };
          if (gp(x, y) < std::min(gp(x, z), gp(z, y))) ++violations;
        }
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("rescaling keeps the tree defect at zero and scales products") {
  const auto F = Group::free(2);
  const Ball ball(F, 2);
  const auto base = MetricStructure::word(F);
  for (double eps : {1.0, 1.5, 3.0}) {
    const auto m = base.rescaled(eps);
    CHECK(m.gromov_product(F.element("ab"), F.element("ab'")) == doctest::Approx(eps));
    CHECK(check_strong_hyperbolicity(m, ball).max_defect == 0.0);
  }
  // Trees satisfy the min-inequality, so the defect is zero at every scale.
  double previous = check_strong_hyperbolicity(base.rescaled(0.1), ball).max_defect;
  for (double eps : {0.25, 0.5, 1.0, 2.0}) {
    const double defect = check_strong_hyperbolicity(base.rescaled(eps), ball).max_defect;
    CHECK(defect <= previous);
    previous = defect;
  }
  CHECK(previous == 0.0);
}

TEST_CASE("zero defect implies the classical inequality with log 2") {
  const auto F = Group::free(2);
  const auto m = MetricStructure::word(F);
  const Ball ball(F, 3);
  REQUIRE(check_strong_hyperbolicity(m, ball).max_defect == 0.0);
  const double delta = std::log(2.0);
  std::size_t failures = 0;
  for (const auto& x : ball.elements()) {
    for (const auto& y : ball.elements()) {
      for (const auto& z : ball.elements()) {
        const double lhs = m.gromov_product(x, y);
        if (lhs < std::min(m.gromov_product(x, z), m.gromov_product(z, y)) - delta) ++failures;
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("quadruples with x = y never fail and sampled mode is seeded") {
  const auto S = Group::surface(2);
  const auto m = MetricStructure::word(S);
  const Ball ball(S, 2);
  FourPointOptions opts;
  opts.mode = ScanMode::sampled;
  opts.samples = 20000;
  opts.seed = 3;
  const auto a = check_strong_hyperbolicity(m, ball, opts);
  const auto b = check_strong_hyperbolicity(m, ball, opts);
  CHECK(a.max_defect == b.max_defect);
  CHECK(a.quadruples_checked == 20000);
  if (a.witness) CHECK_FALSE(S.equal(a.witness->x, a.witness->y));
  opts.mode = ScanMode::exhaustive;
  opts.max_quadruples = 1000;
  CHECK_THROWS_AS(check_strong_hyperbolicity(m, ball, opts), ResourceError);
}

TEST_CASE("Green metric of the simple walk") {
  for (auto [k, truncation] : {std::pair{2, 12}, std::pair{3, 8}}) {
    const auto F = Group::free(k);
    const auto g = build_green_metric(F, GreenWalk::simple(F, truncation));
    CHECK(g.kind() == MetricKind::green);
    CHECK_FALSE(g.exact());
    const double root = first_passage_root(k);
    CHECK(std::abs(root - 1.0 / (2 * k - 1)) < 1e-15);
    const double unit = -std::log(root);
    CHECK(std::abs(g.distance(F.identity(), F.element("a")) - unit) < 1e-6);
    const Ball ball(F, truncation - 4);
    double worst = 0.0;
    for (const auto& x : ball.elements()) {
      worst = std::max(worst, std::abs(g.length(x) - unit * static_cast<double>(x.size())));
    }
    CHECK(worst < 1e-6);
    CHECK(g.distance(F.element("ab"), F.element("ab")) == 0.0);
    const auto* diag = g.green_diagnostics();
    REQUIRE(diag);
    CHECK(diag->truncation == truncation);
    CHECK(diag->extrapolation_error < 1e-6);
    CHECK(g.rough_constant() < 1e-6);

    const auto path = rough_geodesic(g, F.identity(), F.element("ab"));
    REQUIRE(path.points.size() == 3);
    CHECK(path.parameters[2] == doctest::Approx(2 * unit));
    CHECK(path.achieved_constant < 1e-6);
  }
}

TEST_CASE("Green metric on the free product of Z/2 and Z/3") {
  // First-passage probabilities u = F(a, 1), v = F(b, 1) of the uniform walk
  // on a, b, b' solve u = 1/3 + 2uv/3 and v = 1/3 + v/3 + uv/3; iterate from
  // zero to the minimal solution.
  double u = 0.0, v = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double nu = 1.0 / 3 + 2.0 * u * v / 3;
    const double nv = 1.0 / 3 + v / 3 + u * v / 3;
    u = nu;
    v = nv;
  }
  const auto M = Group::modular();
  const auto g = build_green_metric(M, GreenWalk::simple(M, 12));
  CHECK(std::abs(g.length(M.element("a")) + std::log(u)) < 1e-3);
  CHECK(std::abs(g.length(M.element("b")) + std::log(v)) < 1e-3);
  CHECK(std::abs(g.length(M.element("b'")) + std::log(v)) < 1e-3);
  // a is a cut point between 1 and ab in the Cayley graph.
  CHECK(std::abs(g.length(M.element("ab")) + std::log(u * v)) < 1e-3);
  CHECK(std::abs(g.length(M.element("ab")) - g.length(M.element("b'a"))) < 1e-3);
}

TEST_CASE("Green walk validation") {
  const auto F = Group::free(2);
  GreenWalk lopsided;
  lopsided.steps = {{F.element("a"), 0.5}, {F.element("b"), 0.5}};
  CHECK_THROWS_AS(build_green_metric(F, lopsided), InputError);
  GreenWalk partial;
  partial.steps = {{F.element("a"), 0.5}, {F.element("a'"), 0.5}};
  CHECK_THROWS_AS(build_green_metric(F, partial), InputError);
  GreenWalk heavy = GreenWalk::simple(F);
  heavy.steps[0].second = 0.5;
  CHECK_THROWS_AS(build_green_metric(F, heavy), InputError);
}

TEST_CASE("rough geodesics in the tree") {
  const auto F = Group::free(2);
  const auto m = MetricStructure::word(F);
  auto path = rough_geodesic(m, F.identity(), F.element("ab"));
  REQUIRE(path.points.size() == 3);
  CHECK(F.format(path.points[1]) == "a");
  CHECK(path.achieved_constant == 0.0);
  const auto x = F.element("aab"), y = F.element("ab'b'");
  path = rough_geodesic(m, x, y);
  CHECK(path.points.size() == static_cast<std::size_t>(m.word_distance(x, y) + 1));
  CHECK(F.equal(path.points.front(), x));
  CHECK(F.equal(path.points.back(), y));
  CHECK(F.format(path.points[2]) == "a");  // through the common prefix
  CHECK(path.achieved_constant == 0.0);
}

TEST_CASE("growth exponents") {
  CHECK(growth_exponent(Ball(Group::free(2), 6)) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(growth_exponent(Ball(Group::free(3), 6)) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK_THROWS_AS(growth_exponent(Ball(Group::free(2), 0)), InputError);
}
