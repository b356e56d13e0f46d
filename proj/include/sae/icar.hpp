#pragma once

#include "sae/area_graph.hpp"
#include "sae/types.hpp"

namespace sae {

// Intrinsic CAR structure for a contiguity graph, scaled so that the
// generalized marginal variance is one.
//
// The unscaled precision is Q0 = diag(degree) - adjacency.  Writing V for the
// Moore-Penrose inverse of Q0, the scale factor is the geometric mean of
// diag(V); multiplying Q0 by it makes the geometric mean of the scaled
// marginal variances exactly one, so a spatial variance parameter multiplying
// this operator is comparable across graphs (and comparable with an
// unstructured effect's variance).
struct IcarOperator {
  Matrix q_scaled;      // scaled precision (rank-deficient)
  Matrix q_ginv;        // Moore-Penrose generalized inverse of q_scaled
  double scale = 1.0;   // geometric-mean marginal variance of the unscaled operator
  int rank = 0;         // n - number of connected components
  Vector eigenvalues;   // eigenvalues of q_scaled, ascending
  Matrix eigenvectors;  // matching orthonormal eigenvectors (columns)
};

// Unscaled ICAR precision Q0 = diag(degree) - adjacency.
Matrix icar_precision_unscaled(const AreaGraph& graph);

// Moore-Penrose inverse of a symmetric positive semidefinite matrix via its
// spectral decomposition.  Eigenvalues at or below n * eps * lambda_max are
// treated as zero; materially negative ones are an error.
Matrix generalized_inverse(const Matrix& m);

// Build the scaled ICAR operator for a graph.  Requires at least one edge
// and no isolated areas (an isolated area has zero marginal variance under
// the intrinsic prior, so no scaling can make it comparable).
IcarOperator scale_icar(const AreaGraph& graph);

}  // namespace sae
