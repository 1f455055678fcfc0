#include "hyperlab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "hyperlab/errors.hpp"

namespace hyperlab {

namespace {

void require_free(const Group& group) {
  if (group.kind() != PresentationKind::free) {
    throw UnsupportedError("the exact boundary model is only available for free groups (got " + group.spec() + ")");
  }
}

Word rotate(const Word& c, std::size_t r) {
  Word out(c.begin() + static_cast<std::ptrdiff_t>(r), c.end());
  out.insert(out.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(r));
  return out;
}

Word primitive_root(const Word& c) {
  const std::size_t n = c.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool periodic = true;
    for (std::size_t i = d; i < n && periodic; ++i) periodic = c[i] == c[i - d];
    if (periodic) return Word(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return c;
}

std::size_t common_prefix(const Word& g, const BoundaryPoint& xi) {
  std::size_t n = 0;
  while (n < g.size() && g[n] == letter(xi, n)) ++n;
  return n;
}

}  // namespace

BoundaryPoint make_boundary_point(const Group& group, const Word& u_in, const Word& c_in) {
  require_free(group);
  const auto& alpha = group.alphabet();
  Word u = free_reduce(alpha, u_in);
  Word c = free_reduce(alpha, c_in);
  if (c.empty()) throw InputError("boundary point period must be a nontrivial element");

  // c = s c' s^-1 gives c^inf = s c'^inf.
  while (c.size() > 1 && c.back() == alpha.inverse(c.front())) {
    u.push_back(c.front());
    c = Word(c.begin() + 1, c.end() - 1);
  }
  u = free_reduce(alpha, u);
  // Cancel u against the start of c^inf.
  while (!u.empty() && u.back() == alpha.inverse(c.front())) {
    u.pop_back();
    c = rotate(c, 1);
  }
  c = primitive_root(c);

  std::size_t best = 0;
  for (std::size_t r = 1; r < c.size(); ++r) {
    if (rotate(c, r) < rotate(c, best)) best = r;
  }
  u.insert(u.end(), c.begin(), c.begin() + static_cast<std::ptrdiff_t>(best));
  c = rotate(c, best);
  while (u.size() >= c.size() && std::equal(c.begin(), c.end(), u.end() - static_cast<std::ptrdiff_t>(c.size()))) {
    u.resize(u.size() - c.size());
  }
  return BoundaryPoint{std::move(u), std::move(c)};
}

BoundaryPoint parse_boundary_point(const Group& group, std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) throw InputError("boundary point must be written as u|c");
  const auto u = text.substr(0, bar);
  const auto c = text.substr(bar + 1);
  const Word uw = u.empty() ? Word{} : group.alphabet().parse(u);
  return make_boundary_point(group, uw, group.alphabet().parse(c));
}

std::string format(const Group& group, const BoundaryPoint& xi) {
  const std::string u = xi.prefix.empty() ? std::string() : group.alphabet().format(xi.prefix);
  return u + "|" + group.alphabet().format(xi.period);
}

Symbol letter(const BoundaryPoint& xi, std::size_t i) {
  if (i < xi.prefix.size()) return xi.prefix[i];
  return xi.period[(i - xi.prefix.size()) % xi.period.size()];
}

Word boundary_prefix(const BoundaryPoint& xi, std::size_t n) {
  Word w;
  w.reserve(n);
  for (std::size_t i = 0; i < n; ++i) w.push_back(letter(xi, i));
  return w;
}

BoundaryPoint act(const Group& group, const GroupElement& g, const BoundaryPoint& xi) {
  require_free(group);
  if (g.group_id != group.id()) throw InputError("element belongs to a different group");
  Word u = g.word;
  u.insert(u.end(), xi.prefix.begin(), xi.prefix.end());
  return make_boundary_point(group, u, xi.period);
}

ExtendedLength boundary_gromov(const Group& group, const BoundaryPoint& xi, const BoundaryPoint& eta) {
  require_free(group);
  if (xi == eta) return ExtendedLength{true, 0};
  // Two eventually periodic words agreeing this long coincide.
  const std::size_t limit = std::max(xi.prefix.size(), eta.prefix.size()) + xi.period.size() + eta.period.size();
  std::size_t n = 0;
  while (n < limit && letter(xi, n) == letter(eta, n)) ++n;
  if (n == limit) throw InvariantViolation("boundary points agree beyond the periodicity bound but differ");
  return ExtendedLength{false, static_cast<std::int64_t>(n)};
}

std::int64_t boundary_gromov(const Group& group, const GroupElement& g, const BoundaryPoint& xi) {
  require_free(group);
  return static_cast<std::int64_t>(common_prefix(g.word, xi));
}

double visual_distance(const Group& group, const BoundaryPoint& xi, const BoundaryPoint& eta) {
  const auto p = boundary_gromov(group, xi, eta);
  return p.infinite ? 0.0 : std::exp(-static_cast<double>(p.value));
}

std::int64_t busemann_boundary(const Group& group, const GroupElement& g, const BoundaryPoint& xi) {
  return 2 * boundary_gromov(group, g, xi) - static_cast<std::int64_t>(g.size());
}

std::int64_t boundary_haagerup(const Group& group, const GroupElement& g, const BoundaryPoint& xi,
                               const BoundaryPoint& eta) {
  return boundary_gromov(group, g, xi) - boundary_gromov(group, g, eta);
}

FixedPoints fixed_points(const Group& group, const GroupElement& g) {
  if (group.is_torsion(g) && !g.empty()) throw UnsupportedError("torsion elements have no boundary fixed points");
  require_free(group);
  if (g.empty()) throw InputError("the identity has no attracting fixed point");
  const auto d = group.cyclically_reduce(g);
  FixedPoints fp{make_boundary_point(group, d.conjugator.word, d.core.word),
                 make_boundary_point(group, d.conjugator.word, inverse_word(group.alphabet(), d.core.word)),
                 static_cast<std::int64_t>(d.core.size())};
  return fp;
}

double BoundaryMeasure::dimension() const { return std::log(2.0 * rank - 1.0); }

std::size_t cylinder_count(int rank, int depth) {
  if (depth == 0) return 1;
  std::size_t n = 2 * static_cast<std::size_t>(rank);
  for (int i = 1; i < depth; ++i) n *= 2 * static_cast<std::size_t>(rank) - 1;
  return n;
}

std::vector<Word> cylinders(const Group& group, int depth) {
  require_free(group);
  if (depth < 0) throw InputError("cylinder depth must be non-negative");
  const auto& alpha = group.alphabet();
  std::vector<Word> level{Word{}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Word> next;
    next.reserve(level.size() * alpha.size());
    for (const auto& w : level) {
      for (std::size_t s = 0; s < alpha.size(); ++s) {
        const auto sym = static_cast<Symbol>(s);
        if (!w.empty() && sym == alpha.inverse(w.back())) continue;
        Word x = w;
        x.push_back(sym);
        next.push_back(std::move(x));
      }
    }
    level = std::move(next);
  }
  return level;
}

std::size_t cylinder_index(const Group& group, const Word& w) {
  const auto& alpha = group.alphabet();
  const std::size_t branch = alpha.size() - 1;
  std::size_t index = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::size_t rank = w[i];
    if (i > 0) {
      const auto forbidden = alpha.inverse(w[i - 1]);
      if (w[i] == forbidden) throw InputError("cylinder word is not reduced");
      if (forbidden < w[i]) --rank;
      index = index * branch + rank;
    } else {
      index = rank;
    }
  }
  return index;
}

Rational cylinder_measure(const BoundaryMeasure& mu, const Group& group, const Word& w) {
  require_free(group);
  if (mu.rank != group.free_rank()) throw InputError("measure rank does not match the group");
  if (free_reduce(group.alphabet(), w) != w) throw InputError("cylinder word is not reduced");
  if (w.empty()) return Rational(1);
  return Rational(1, static_cast<std::int64_t>(cylinder_count(mu.rank, static_cast<int>(w.size()))));
}

CylinderImage translate_cylinder(const Group& group, const GroupElement& g, const Word& w) {
  require_free(group);
  if (w.empty()) return CylinderImage{{}, false};
  const auto& alpha = group.alphabet();
  const auto& gw = g.word;
  std::size_t t = 0;
  while (t < gw.size() && t < w.size() && gw[gw.size() - 1 - t] == alpha.inverse(w[t])) ++t;
  if (t < w.size()) {
    Word out(gw.begin(), gw.end() - static_cast<std::ptrdiff_t>(t));
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(t), w.end());
    return CylinderImage{std::move(out), false};
  }
  // w^-1 is a suffix of g: g C_w is everything outside C_{g''s}, g = g'' w^-1
  // and s = w_last^-1 the first letter of w^-1.
  Word out(gw.begin(), gw.begin() + static_cast<std::ptrdiff_t>(gw.size() - w.size() + 1));
  return CylinderImage{std::move(out), true};
}

Rational measure_of(const BoundaryMeasure& mu, const Group& group, const CylinderImage& image) {
  const auto m = cylinder_measure(mu, group, image.word);
  return image.complement ? Rational(1) - m : m;
}

ConformalityReport conformality_check(const Group& group, const GroupElement& g, int depth) {
  require_free(group);
  if (depth < 1) throw InputError("conformality depth must be at least 1");
  const BoundaryMeasure mu{group.free_rank()};
  const auto g_inv = group.invert(g);
  const auto base = 2 * static_cast<std::int64_t>(group.free_rank()) - 1;
  ConformalityReport report;
  for (const auto& w : cylinders(group, depth)) {
    std::size_t lcp = 0;
    while (lcp < w.size() && lcp < g.size() && w[lcp] == g.word[lcp]) ++lcp;
    if (lcp == w.size() && w.size() < g.size()) {
      throw InputError("b(g) is not constant on the cylinder " + group.alphabet().format(w) +
                       "; use depth >= " + std::to_string(g.size()));
    }
    ConformalityRecord rec;
    rec.cylinder = w;
    rec.busemann = 2 * static_cast<std::int64_t>(lcp) - static_cast<std::int64_t>(g.size());
    rec.ratio = measure_of(mu, group, translate_cylinder(group, g_inv, w)) / cylinder_measure(mu, group, w);
    rec.passed = rec.ratio == rational_power(base, rec.busemann);
    ++report.cylinders_checked;
    if (!rec.passed) ++report.failures;
    report.records.push_back(std::move(rec));
  }
  return report;
}

ConformalIdentityReport conformal_identity_check(const Group& group, const GroupElement& g, const BoundaryPoint& xi,
                                                 const BoundaryPoint& eta) {
  if (xi == eta) throw InputError("conformal identity needs distinct boundary points");
  const auto gx = act(group, g, xi);
  const auto gy = act(group, g, eta);
  const auto g_inv = group.invert(g);
  ConformalIdentityReport report;
  report.lhs = 2 * boundary_gromov(group, gx, gy).value;
  report.rhs = -busemann_boundary(group, g_inv, xi) - busemann_boundary(group, g_inv, eta) +
               2 * boundary_gromov(group, xi, eta).value;
  report.passed = report.lhs == report.rhs;
  return report;
}

std::vector<BoundaryPoint> seeded_points(const Group& group, std::size_t count, std::uint64_t seed, int max_prefix,
                                         int max_period) {
  require_free(group);
  if (max_prefix < 0 || max_period < 1) throw InputError("invalid boundary point family bounds");
  const auto& alpha = group.alphabet();
  std::mt19937_64 rng(seed);
  auto random_reduced = [&](std::size_t length) {
    Word w;
    while (w.size() < length) {
      const auto s = static_cast<Symbol>(rng() % alpha.size());
      if (!w.empty() && s == alpha.inverse(w.back())) continue;
      w.push_back(s);
    }
    return w;
  };
  std::vector<BoundaryPoint> out;
  std::set<std::pair<Word, Word>> seen;
  for (std::size_t attempt = 0; out.size() < count && attempt < 1000 * count + 1000; ++attempt) {
    const Word u = random_reduced(rng() % (static_cast<std::size_t>(max_prefix) + 1));
    Word c = random_reduced(1 + rng() % static_cast<std::size_t>(max_period));
    if (c.size() > 1 && c.back() == alpha.inverse(c.front())) continue;
    auto xi = make_boundary_point(group, u, c);
    if (seen.insert({xi.prefix, xi.period}).second) out.push_back(std::move(xi));
  }
  if (out.size() < count) throw ResourceError("could not draw enough distinct boundary points");
  return out;
}

}  // namespace hyperlab
