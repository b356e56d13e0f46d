#include "sae/spatial_stats.hpp"

#include <utility>
#include <vector>

#include "sae/errors.hpp"

namespace sae {

double gearys_c(const Vector& values, const AreaGraph& graph) {
  if (values.size() != graph.n) {
    throw UsageError(errc::dimension_mismatch, "value count does not match graph size");
  }
  if (!graph.has_edges()) {
    throw DataError(errc::no_edges, "Geary's C needs at least one edge");
  }
  const double mean = values.mean();
  double denom = 0.0;
  for (int i = 0; i < graph.n; ++i) {
    const double d = values[i] - mean;
    denom += d * d;
  }
  if (denom == 0.0) {
    throw DataError(errc::zero_variance, "Geary's C is undefined for constant values");
  }
  double num = 0.0;
  for (const auto& [i, k] : graph.edges) {
    const double d = values[i] - values[k];
    num += d * d;
  }
  const double w = 2.0 * static_cast<double>(graph.edges.size());
  return (graph.n - 1) * num / (2.0 * w * denom);
}

double gearys_c_mc_test(const Vector& values, const AreaGraph& graph, int iterations,
                        RngStream& rng) {
  if (iterations < 1) {
    throw UsageError(errc::invalid_argument, "permutation test needs at least one iteration");
  }
  const double observed = gearys_c(values, graph);
  Vector perm = values;
  int at_or_below = 0;
  for (int it = 0; it < iterations; ++it) {
    // Fisher-Yates shuffle driven by this stream only.
    for (int i = graph.n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform01() * (i + 1));
      std::swap(perm[i], perm[j]);
    }
    if (gearys_c(perm, graph) <= observed) ++at_or_below;
  }
  return (1.0 + at_or_below) / (iterations + 1.0);
}

}  // namespace sae
