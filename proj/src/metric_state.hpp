#pragma once

#include <memory>
#include <vector>

#include "hyperlab/metric.hpp"

namespace hyperlab {

struct MetricStructure::State {
  explicit State(Group g) : group(std::move(g)) {}

  Group group;
  MetricKind kind = MetricKind::word;
  double scale = 1.0;
  double rough_constant = 0.0;
  int lookup_radius = 0;
  /// Length lookups for small-cancellation words and the Green table.
  std::shared_ptr<const Ball> ball;
  /// Green only: -log F(1, g) per ball index, valid up to lookup_radius.
  std::vector<double> green_length;
  GreenDiagnostics diagnostics;
};

}  // namespace hyperlab
