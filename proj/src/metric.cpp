#include "hyperlab/metric.hpp"

#include <algorithm>
#include <cmath>

#include "hyperlab/errors.hpp"
#include "metric_state.hpp"

namespace hyperlab {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::word: return "word";
    case MetricKind::tree_exact: return "tree-exact";
    case MetricKind::green: return "green";
  }
  return "unknown";
}

MetricKind parse_metric_kind(std::string_view text) {
  if (text == "word") return MetricKind::word;
  if (text == "tree" || text == "tree-exact") return MetricKind::tree_exact;
  if (text == "green") return MetricKind::green;
  throw InputError("unknown metric kind '" + std::string(text) + "'");
}

MetricStructure MetricStructure::word(const Group& group, double scale, int lookup_radius) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("metric scale must be positive");
  auto state = std::make_shared<State>(group);
  state->kind = group.kind() == PresentationKind::free ? MetricKind::tree_exact : MetricKind::word;
  state->scale = scale;
  state->rough_constant = 0.0;
  state->lookup_radius = lookup_radius;
  if (!group.has_unique_normal_forms()) {
    if (lookup_radius < 0) throw InputError("lookup radius must be non-negative");
    state->ball = std::make_shared<const Ball>(group, lookup_radius, BallOptions{8'000'000, false});
  } else {
    state->lookup_radius = std::numeric_limits<int>::max();
  }
  return MetricStructure(std::move(state));
}

const Group& MetricStructure::group() const { return state_->group; }
MetricKind MetricStructure::kind() const { return state_->kind; }
ValueMode MetricStructure::value_mode() const {
  return state_->kind == MetricKind::green ? ValueMode::float_with_error : ValueMode::exact_rational;
}
double MetricStructure::scale() const { return state_->scale; }
double MetricStructure::rough_constant() const { return state_->rough_constant; }
int MetricStructure::lookup_radius() const { return state_->lookup_radius; }
const GreenDiagnostics* MetricStructure::green_diagnostics() const {
  return state_->kind == MetricKind::green ? &state_->diagnostics : nullptr;
}

MetricStructure MetricStructure::rescaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InputError("rescaling factor must be positive");
  auto state = std::make_shared<State>(*state_);
  state->scale *= factor;
  state->rough_constant *= factor;
  return MetricStructure(std::move(state));
}

std::int64_t MetricStructure::word_length(const GroupElement& g) const {
  if (!exact()) throw UnsupportedError("word_length: metric is not exact");
  if (g.group_id != group().id()) throw InputError("element belongs to a different group");
  if (group().has_unique_normal_forms()) return static_cast<std::int64_t>(g.size());
  const auto idx = state_->ball->find(g);
  if (!idx) {
    throw ResourceError("word length exceeds the lookup radius " + std::to_string(state_->lookup_radius) +
                        " (element " + group().format(g) + ")");
  }
  return state_->ball->length(*idx);
}

std::int64_t MetricStructure::word_distance(const GroupElement& x, const GroupElement& y) const {
  return word_length(group().multiply(group().invert(x), y));
}

std::int64_t MetricStructure::gromov_product_x2(const GroupElement& x, const GroupElement& y) const {
  return word_length(x) + word_length(y) - word_distance(x, y);
}

double MetricStructure::length(const GroupElement& g) const {
  if (exact()) return state_->scale * static_cast<double>(word_length(g));
  const auto idx = state_->ball->find(g);
  if (!idx || state_->ball->length(*idx) > state_->lookup_radius) {
    throw ResourceError("Green metric is only resolved up to word length " + std::to_string(state_->lookup_radius) +
                        " (element " + group().format(g) + ")");
  }
  return state_->scale * state_->green_length[*idx];
}

double MetricStructure::distance(const GroupElement& x, const GroupElement& y) const {
  return length(group().multiply(group().invert(x), y));
}

double MetricStructure::gromov_product(const GroupElement& x, const GroupElement& y) const {
  if (exact()) return 0.5 * state_->scale * static_cast<double>(gromov_product_x2(x, y));
  return 0.5 * (length(x) + length(y) - distance(x, y));
}

Word MetricStructure::geodesic_word(const GroupElement& g) const {
  if (group().has_unique_normal_forms()) return g.word;
  const auto& ball = state_->ball;
  const auto idx = ball ? ball->find(g) : std::nullopt;
  if (!idx) throw ResourceError("no geodesic available beyond the lookup radius for " + group().format(g));
  return ball->geodesic_word(*idx);
}

RoughGeodesic rough_geodesic(const MetricStructure& metric, const GroupElement& x, const GroupElement& y) {
  const auto& G = metric.group();
  const Word path = metric.geodesic_word(G.multiply(G.invert(x), y));
  RoughGeodesic out;
  out.points.push_back(x);
  Word prefix;
  for (Symbol s : path) {
    prefix.push_back(s);
    out.points.push_back(G.multiply(x, G.normalize(prefix)));
  }
  for (const auto& p : out.points) {
    out.parameters.push_back(metric.exact() ? metric.scale() * static_cast<double>(out.parameters.size())
                                            : metric.distance(x, p));
  }
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    for (std::size_t j = i + 1; j < out.points.size(); ++j) {
      const double gap = std::abs(metric.distance(out.points[i], out.points[j]) -
                                  std::abs(out.parameters[j] - out.parameters[i]));
      out.achieved_constant = std::max(out.achieved_constant, gap);
    }
  }
  return out;
}

double growth_exponent(const Ball& ball) {
  if (ball.radius() < 3) throw InputError("growth_exponent needs a ball of radius >= 3");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = ball.radius();
  for (int r = 1; r <= n; ++r) {
    const auto count = ball.sphere_sizes()[static_cast<std::size_t>(r)];
    if (count == 0) throw NumericError("growth_exponent: empty sphere at radius " + std::to_string(r));
    const double y = std::log(static_cast<double>(count));
    sx += r;
    sy += y;
    sxx += static_cast<double>(r) * r;
    sxy += r * y;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace hyperlab
