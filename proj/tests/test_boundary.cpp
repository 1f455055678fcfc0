#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperlab/ball.hpp"
#include "hyperlab/boundary.hpp"
#include "hyperlab/cocycles.hpp"
#include "hyperlab/errors.hpp"

using namespace hyperlab;

namespace {

const Group& F2() {
  static const Group g = Group::free(2);
  return g;
}

BoundaryPoint pt(std::string_view text) { return parse_boundary_point(F2(), text); }

/// Oracle: the reduced form of g followed by a long prefix of xi.
Word translated_prefix(const GroupElement& g, const BoundaryPoint& xi, std::size_t n) {
  Word w = g.word;
  const auto tail = boundary_prefix(xi, n + g.size() + 8);
  w.insert(w.end(), tail.begin(), tail.end());
  w = free_reduce(F2().alphabet(), w);
  w.resize(n);
  return w;
}

bool reduced(const Word& w) { return free_reduce(F2().alphabet(), w) == w; }

}  // namespace

TEST_CASE("canonical boundary points") {
  const auto& F = F2();
  CHECK(pt("|b") == make_boundary_point(F, {}, F.alphabet().parse("bb")));
  CHECK(format(F, pt("ab|ab")) == "|ab");
  CHECK(format(F, pt("b|ab")) == "b|ab");
  CHECK(pt("b|ab") == make_boundary_point(F, {}, F.alphabet().parse("ba")));
  CHECK(format(F, make_boundary_point(F, {}, F.alphabet().parse("ba"))) == "b|ab");
  CHECK(format(F, make_boundary_point(F, F.alphabet().parse("a"), F.alphabet().parse("a'b"))) == "b|a'b");
  CHECK(format(F, make_boundary_point(F, {}, F.alphabet().parse("aba'"))) == "a|b");
  CHECK_THROWS_AS(make_boundary_point(F, {}, F.alphabet().parse("aa'")), InputError);
  CHECK_THROWS_AS(make_boundary_point(Group::surface(2), {}, {0}), UnsupportedError);

  for (const auto& xi : seeded_points(F, 50, 5)) {
    CHECK(reduced(boundary_prefix(xi, 40)));
    // Canonical form is a fixed point of canonicalization.
    CHECK(make_boundary_point(F, xi.prefix, xi.period) == xi);
    // Same infinite word as any other representation.
    auto shifted = xi.prefix;
    shifted.insert(shifted.end(), xi.period.begin(), xi.period.end());
    CHECK(make_boundary_point(F, shifted, xi.period) == xi);
  }
}

TEST_CASE("boundary action") {
  const auto& F = F2();
  CHECK(act(F, F.element("a"), pt("|b")) == pt("a|b"));
  CHECK(act(F, F.element("a'"), pt("|a")) == pt("|a"));
  CHECK(act(F, F.element("a'"), pt("a|b")) == pt("|b"));

  const auto family = seeded_points(F, 50, 17);
  const Ball b2(F, 2);
  std::size_t law = 0, prefix = 0;
  for (const auto& xi : family) {
    for (const auto& g : b2.elements()) {
      const auto gx = act(F, g, xi);
      if (boundary_prefix(gx, 30) != translated_prefix(g, xi, 30)) ++prefix;
      for (const auto& h : b2.elements()) {
        if (act(F, g, act(F, h, xi)) != act(F, F.multiply(g, h), xi)) ++law;
      }
    }
  }
  CHECK(law == 0);
  CHECK(prefix == 0);
}

TEST_CASE("boundary Gromov products and visual distance") {
  const auto& F = F2();
  CHECK(boundary_gromov(F, F.element("abb"), pt("a|b")) == 3);
  CHECK(boundary_gromov(F, pt("|a"), pt("|b")) == ExtendedLength{false, 0});
  CHECK(boundary_gromov(F, pt("a|b"), pt("a|b")).infinite);
  CHECK(visual_distance(F, pt("|a"), pt("|b")) == 1.0);
  CHECK(visual_distance(F, pt("a|b"), pt("ab'|a")) == doctest::Approx(std::exp(-1.0)));
  CHECK(visual_distance(F, pt("a|b"), pt("a|b")) == 0.0);

  // Oracle: common prefix over long prefixes, and the four-point law.
  const auto family = seeded_points(F, 40, 23);
  std::size_t failures = 0;
  for (const auto& xi : family) {
    for (const auto& eta : family) {
      const auto p = boundary_gromov(F, xi, eta);
      const auto a = boundary_prefix(xi, 60), b = boundary_prefix(eta, 60);
      std::size_t n = 0;
      while (n < 60 && a[n] == b[n]) ++n;
      if (p.infinite != (n == 60) || (!p.infinite && p.value != static_cast<std::int64_t>(n))) ++failures;
      for (const auto& zeta : family) {
        if (visual_distance(F, xi, eta) > visual_distance(F, xi, zeta) + visual_distance(F, zeta, eta)) ++failures;
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("boundary Busemann cocycle") {
  const auto& F = F2();
  CHECK(busemann_boundary(F, F.element("a"), pt("|a")) == 1);
  CHECK(busemann_boundary(F, F.element("a"), pt("|b")) == -1);
  CHECK(busemann_boundary(F, F.identity(), pt("ab|b'")) == 0);

  // Limit of the group cocycle along finite approximations.
  const auto m = MetricStructure::word(F);
  const auto family = seeded_points(F, 50, 29);
  const Ball b2(F, 2);
  std::size_t failures = 0;
  for (const auto& xi : family) {
    const auto approx = F.normalize(boundary_prefix(xi, 20));
    for (const auto& g : b2.elements()) {
      if (busemann_boundary(F, g, xi) != busemann_exact(m, g, approx)) ++failures;
      for (const auto& h : b2.elements()) {
        const auto lhs = busemann_boundary(F, F.multiply(g, h), xi);
        const auto rhs = busemann_boundary(F, g, xi) + busemann_boundary(F, h, act(F, F.invert(g), xi));
        if (lhs != rhs) ++failures;
      }
    }
  }
  CHECK(failures == 0);

  // Local constancy on every cylinder of depth |g| + 1.
  const Ball b3(F, 3);
  std::size_t varying = 0;
  for (const auto& g : b3.elements()) {
    for (const auto& w : cylinders(F, static_cast<int>(g.size()) + 1)) {
      std::optional<std::int64_t> value;
      for (std::size_t s = 0; s < 4; ++s) {
        if (static_cast<Symbol>(s) == F.alphabet().inverse(w.back())) continue;
        const auto xi = make_boundary_point(F, w, Word{static_cast<Symbol>(s)});
        const auto v = busemann_boundary(F, g, xi);
        if (value && *value != v) ++varying;
        value = v;
      }
    }
  }
  CHECK(varying == 0);
}

TEST_CASE("fixed points and translation length") {
  const auto& F = F2();
  auto fp = fixed_points(F, F.element("ab"));
  CHECK(fp.attracting == pt("|ab"));
  CHECK(fp.repelling == make_boundary_point(F, {}, F.alphabet().parse("b'a'")));
  CHECK(fp.translation_length == 2);
  auto power = F.identity();
  for (int n = 1; n <= 8; ++n) {
    power = F.multiply(power, F.element("ab"));
    CHECK(power.size() == static_cast<std::size_t>(2 * n));
  }
  fp = fixed_points(F, F.element("aba'"));
  CHECK(fp.attracting == pt("a|b"));
  CHECK(fp.translation_length == 1);
  CHECK_THROWS_AS(fixed_points(F, F.identity()), InputError);
  const auto M = Group::modular();
  CHECK_THROWS_AS(fixed_points(M, M.element("a")), UnsupportedError);

  const Ball b3(F, 3);
  for (std::size_t i = 1; i < b3.size(); ++i) {
    const auto& g = b3.element(i);
    const auto f = fixed_points(F, g);
    const auto plus = busemann_boundary(F, g, f.attracting);
    CHECK(plus == f.translation_length);
    CHECK(plus > 0);
    CHECK(busemann_boundary(F, g, f.repelling) == -plus);
    CHECK(act(F, g, f.attracting) == f.attracting);
    CHECK(act(F, g, f.repelling) == f.repelling);
  }
}

TEST_CASE("cylinder measure") {
  const auto& F = F2();
  const BoundaryMeasure mu{2};
  CHECK(mu.dimension() == doctest::Approx(std::log(3.0)));
  CHECK(cylinder_measure(mu, F, F.alphabet().parse("a")) == Rational(1, 4));
  CHECK(cylinder_measure(mu, F, F.alphabet().parse("ab")) == Rational(1, 12));
  CHECK_THROWS_AS(cylinder_measure(mu, F, Word{0, 1}), InputError);
  for (int d = 0; d <= 5; ++d) {
    Rational total(0);
    const auto cyl = cylinders(F, d);
    CHECK(cyl.size() == cylinder_count(2, d));
    for (std::size_t i = 0; i < cyl.size(); ++i) {
      CHECK(cylinder_index(F, cyl[i]) == i);
      total += cylinder_measure(mu, F, cyl[i]);
      // Subdivision into the children of C_w.
      Rational children(0);
      for (const auto& c : cylinders(F, d + 1)) {
        if (std::equal(cyl[i].begin(), cyl[i].end(), c.begin())) children += cylinder_measure(mu, F, c);
      }
      CHECK(children == cylinder_measure(mu, F, cyl[i]));
    }
    CHECK(total == Rational(1));
  }
}

TEST_CASE("cylinder translation") {
  const auto& F = F2();
  auto img = translate_cylinder(F, F.element("a"), F.alphabet().parse("a'"));
  CHECK(img.complement);
  CHECK(img.word == F.alphabet().parse("a"));
  img = translate_cylinder(F, F.element("a"), F.alphabet().parse("aa"));
  CHECK_FALSE(img.complement);
  CHECK(img.word == F.alphabet().parse("aaa"));

  // Oracle: xi in g C_w iff g^-1 xi starts with w.
  const auto family = seeded_points(F, 60, 31);
  const Ball b2(F, 2);
  std::size_t failures = 0;
  for (const auto& g : b2.elements()) {
    for (int d = 1; d <= 3; ++d) {
      for (const auto& w : cylinders(F, d)) {
        const auto image = translate_cylinder(F, g, w);
        for (const auto& xi : family) {
          const auto back = boundary_prefix(act(F, F.invert(g), xi), w.size());
          const bool member = back == w;
          const auto head = boundary_prefix(xi, image.word.size());
          const bool in_image = (head == image.word) != image.complement;
          if (member != in_image) ++failures;
        }
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("conformality of the cylinder measure") {
  const auto& F = F2();
  auto report = conformality_check(F, F.element("a"), 2);
  CHECK(report.passed());
  for (const auto& rec : report.records) {
    if (rec.cylinder == F.alphabet().parse("ab")) {
      CHECK(rec.ratio == Rational(3));
      CHECK(rec.busemann == 1);
    }
  }
  report = conformality_check(F, F.element("a"), 1);
  for (const auto& rec : report.records) {
    if (rec.cylinder == F.alphabet().parse("b")) {
      CHECK(rec.ratio == Rational(1, 3));
      CHECK(rec.busemann == -1);
    }
  }
  for (const auto& rec : conformality_check(F, F.identity(), 3).records) CHECK(rec.ratio == Rational(1));
  CHECK_THROWS_AS(conformality_check(F, F.element("abab"), 2), InputError);

  const Ball b3(F, 3);
  std::size_t failures = 0;
  for (std::size_t i = 1; i < b3.size(); ++i) {
    const auto& g = b3.element(i);
    failures += conformality_check(F, g, static_cast<int>(g.size()) + 1).failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("conformal metric identity") {
  const auto& F = F2();
  auto r = conformal_identity_check(F, F.element("a"), pt("|b"), pt("|b'"));
  CHECK(r.passed);
  CHECK(r.lhs == 2);
  CHECK(conformal_identity_check(F, F.identity(), pt("|b"), pt("a|b")).passed);
  CHECK_THROWS_AS(conformal_identity_check(F, F.element("a"), pt("|b"), pt("|b")), InputError);

  std::mt19937_64 rng(7);
  const Ball b4(F, 4);
  const auto family = seeded_points(F, 60, 37);
  for (int t = 0; t < 200; ++t) {
    const auto& g = b4.element(rng() % b4.size());
    const auto& xi = family[rng() % family.size()];
    auto eta = family[rng() % family.size()];
    if (eta == xi) eta = act(F, F.element("b"), xi);
    const auto rep = conformal_identity_check(F, g, xi, eta);
    CHECK(rep.passed);
    // Oracle: brute prefix computation at depth 2|g| + the period bound.
    const std::size_t depth = 2 * g.size() + 40;
    const auto a = translated_prefix(g, xi, depth), b = translated_prefix(g, eta, depth);
    std::size_t n = 0;
    while (n < depth && a[n] == b[n]) ++n;
    CHECK(rep.lhs == 2 * static_cast<std::int64_t>(n));
  }
}

TEST_CASE("boundary Haagerup cocycle") {
  const auto& F = F2();
  CHECK(boundary_haagerup(F, F.identity(), pt("|a"), pt("|b")) == 0);
  CHECK(boundary_haagerup(F, F.element("a"), pt("|a"), pt("|b")) == 1);
  const auto family = seeded_points(F, 30, 41);
  const Ball b2(F, 2);
  std::size_t failures = 0;
  for (const auto& g : b2.elements()) {
    for (const auto& h : b2.elements()) {
      for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        const auto& xi = family[i];
        const auto& eta = family[i + 1];
        if (boundary_haagerup(F, g, xi, eta) != -boundary_haagerup(F, g, eta, xi)) ++failures;
        const auto gi = F.invert(g);
        const auto lhs = boundary_haagerup(F, F.multiply(g, h), xi, eta);
        const auto rhs = boundary_haagerup(F, g, xi, eta) + boundary_haagerup(F, h, act(F, gi, xi), act(F, gi, eta));
        if (lhs != rhs) ++failures;
      }
    }
  }
  CHECK(failures == 0);
}
