#pragma once

#include "sae/area_graph.hpp"
#include "sae/rng.hpp"
#include "sae/types.hpp"

namespace sae {

// Geary's contiguity ratio for binary (0/1) edge weights:
//
//   C = (n - 1) * sum_{edges} (x_i - x_k)^2 / (2 * W * sum_i (x_i - xbar)^2)
//
// where the edge sum visits each unordered edge once and W counts ordered
// neighbour pairs (twice the edge count).  Values near 0 indicate positive
// spatial association, values near 1 indicate none.
double gearys_c(const Vector& values, const AreaGraph& graph);

// One-sided Monte Carlo permutation test for positive spatial association:
// the values are randomly permuted over the areas `iterations` times and
//
//   p = (1 + #{ C_perm <= C_observed }) / (iterations + 1).
//
// Small p means the observed C is lower (more clustered) than chance.
double gearys_c_mc_test(const Vector& values, const AreaGraph& graph, int iterations,
                        RngStream& rng);

}  // namespace sae
