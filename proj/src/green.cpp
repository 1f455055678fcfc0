#include <algorithm>
#include <cmath>
#include <map>

#include "hyperlab/errors.hpp"
#include "hyperlab/metric.hpp"
#include "metric_state.hpp"

namespace hyperlab {

namespace {

struct Transition {
  std::uint32_t target;
  double probability;
};

void validate_walk(const Group& group, const GreenWalk& walk) {
  if (walk.steps.empty()) throw InputError("random walk has no steps");
  if (walk.truncation < 6) throw InputError("walk truncation must be at least 6");
  if (!(walk.tolerance > 0.0)) throw InputError("walk tolerance must be positive");
  double total = 0.0;
  std::map<Word, double> mass;
  for (const auto& [g, prob] : walk.steps) {
    if (g.group_id != group.id()) throw InputError("walk step belongs to a different group");
    if (!(prob > 0.0) || !std::isfinite(prob)) throw InputError("walk step probabilities must be positive");
    if (g.empty()) throw InputError("walk steps must not include the identity");
    mass[g.word] += prob;
    total += prob;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("walk step probabilities must sum to 1");
  for (const auto& [word, prob] : mass) {
    const auto inv = group.invert(group.normalize(word));
    const auto it = mass.find(inv.word);
    if (it == mass.end() || std::abs(it->second - prob) > 1e-12) {
      throw InputError("random walk is not symmetric at " + group.alphabet().format(word));
    }
  }
}

}  // namespace

GreenWalk GreenWalk::simple(const Group& group, int truncation) {
  GreenWalk walk;
  walk.truncation = truncation;
  const auto symbols = group.alphabet().size();
  for (std::size_t s = 0; s < symbols; ++s) {
    walk.steps.emplace_back(group.generator(static_cast<Symbol>(s)), 1.0 / static_cast<double>(symbols));
  }
  return walk;
}

MetricStructure build_green_metric(const Group& group, const GreenWalk& walk) {
  validate_walk(group, walk);
  const int T = walk.truncation;
  const int query = walk.query_radius < 0 ? T - 4 : walk.query_radius;
  if (query > T - 4) throw InputError("Green query radius must be at most truncation - 4");

  auto ball = std::make_shared<const Ball>(group, T, BallOptions{6'000'000, true});
  const std::size_t n = ball->size();

  // Right-multiplication transitions restricted to the ball.
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<Transition> transitions;
  transitions.reserve(n * walk.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i] = transitions.size();
    for (const auto& [step, prob] : walk.steps) {
      std::int64_t target = -1;
      if (step.size() == 1) {
        target = ball->neighbor(i, step.word[0]);
      } else if (auto found = ball->find(group.multiply(ball->element(i), step))) {
        target = static_cast<std::int64_t>(*found);
      }
      if (target >= 0) transitions.push_back({static_cast<std::uint32_t>(target), prob});
    }
  }
  offsets[n] = transitions.size();

  // The support must generate: every generator is reachable from 1 inside the ball.
  {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (std::size_t t = offsets[i]; t < offsets[i + 1]; ++t) {
        const auto j = transitions[t].target;
        if (!seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    for (std::size_t s = 0; s < group.alphabet().size(); ++s) {
      const auto idx = ball->neighbor(0, static_cast<Symbol>(s));
      if (idx < 0 || !seen[static_cast<std::size_t>(idx)]) {
        throw InputError("walk support does not generate the group");
      }
    }
  }

  // h_t(z) = P_z(hit 1 before leaving the radius-t ball), for t = T-5..T.
  std::vector<double> h(n, 0.0);
  h[0] = 1.0;
  std::vector<std::vector<double>> levels;
  GreenDiagnostics diag;
  diag.truncation = T;
  diag.query_radius = query;
  diag.unknowns = n - 1;
  const std::size_t query_end = ball->sphere_begin(query) + ball->sphere_sizes()[static_cast<std::size_t>(query)];
  for (int t = T - 5; t <= T; ++t) {
    const std::size_t end = t == T ? n : ball->sphere_begin(t + 1);
    const double tol = walk.tolerance * 1e-2;
    int sweeps = 0;
    for (;; ++sweeps) {
      if (sweeps > 200'000) throw NumericError("Gauss-Seidel solve did not converge");
      double change = 0.0;
      for (std::size_t i = 1; i < end; ++i) {
        double v = 0.0;
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
          const auto j = transitions[k].target;
          if (j < end) v += transitions[k].probability * h[j];
        }
        change = std::max(change, std::abs(v - h[i]));
        h[i] = v;
      }
      if (!std::isfinite(change)) throw NumericError("Gauss-Seidel solve diverged");
      if (change < tol) break;
    }
    diag.sweeps.push_back(sweeps + 1);
    levels.emplace_back(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(query_end));
  }

  // The error h - h_t can depend on the parity of t (free products with
  // torsion), so extrapolation uses radii of one parity and only accepts a
  // geometric ratio.
  auto aitken = [](double a, double b, double c) {
    const double d1 = c - b;
    const double d0 = b - a;
    if (!(d0 > 0.0) || !(d1 >= 0.0) || !(d1 < d0)) return c;
    const double v = c + d1 * d1 / (d0 - d1);
    return std::isfinite(v) ? v : c;
  };

  auto state = std::make_shared<MetricStructure::State>(group);
  state->kind = MetricKind::green;
  state->scale = 1.0;
  state->lookup_radius = query;
  state->ball = ball;
  state->green_length.assign(query_end, 0.0);
  for (std::size_t i = 0; i < query_end; ++i) {
    // F(1, g) = P_{g^-1}(hit 1).
    const auto inv = ball->find(group.invert(ball->element(i)));
    if (!inv) throw InvariantViolation("inverse missing from the Green ball");
    const auto j = *inv;
    const double est = aitken(levels[1][j], levels[3][j], levels[5][j]);
    const double prev = aitken(levels[0][j], levels[2][j], levels[4][j]);
    if (!(est > 0.0)) throw NumericError("first-passage probability vanished; increase the truncation");
    state->green_length[i] = i == 0 ? 0.0 : -std::log(est);
    if (i != 0) {
      diag.truncation_gap = std::max(diag.truncation_gap, std::abs(std::log(est) - std::log(levels[5][j])));
      // The T-5 solve does not reach the outermost queried sphere.
      if (ball->length(i) <= T - 5) {
        diag.extrapolation_error = std::max(diag.extrapolation_error, std::abs(std::log(est) - std::log(prev)));
      }
    }
  }
  state->diagnostics = diag;

  MetricStructure metric(state);
  // Rough constant along word geodesics of the query ball.
  double rough = 0.0;
  const int half = query / 2;
  const std::size_t half_end = ball->sphere_begin(half) + ball->sphere_sizes()[static_cast<std::size_t>(half)];
  for (std::size_t i = 1; i < half_end; ++i) {
    const auto path = rough_geodesic(metric, group.identity(), ball->element(i));
    rough = std::max(rough, path.achieved_constant);
  }
  state->rough_constant = rough;
  return metric;
}

}  // namespace hyperlab
