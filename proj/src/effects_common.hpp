#pragma once

#include "sae/area_graph.hpp"
#include "sae/types.hpp"

namespace sae::detail {

// Constraint rows for a stacked (beta, v1, v2) coefficient vector: one global
// sum-to-zero row for the unstructured effect and one per connected component
// for the intrinsic spatial effect (which is only identified up to a constant
// within each component).
inline Matrix effect_constraints(int n_covariates, const AreaGraph& graph) {
  const int n = graph.n;
  Matrix a = Matrix::Zero(1 + graph.n_components, n_covariates + 2 * n);
  for (int i = 0; i < n; ++i) {
    a(0, n_covariates + i) = 1.0;
    a(1 + graph.component[i], n_covariates + n + i) = 1.0;
  }
  return a;
}

// Constraint rows for a stacked (psi1, psi2) field: per-component sum-to-zero
// on the spatial half only; the unstructured half is left free.
inline Matrix field_constraints(const AreaGraph& graph) {
  const int n = graph.n;
  Matrix a = Matrix::Zero(graph.n_components, 2 * n);
  for (int i = 0; i < n; ++i) {
    a(graph.component[i], n + i) = 1.0;
  }
  return a;
}

// The constrained draw satisfies its zero-sum rows only up to floating-point
// residue, which scales with the draw and the conditioning.  These remove
// that residue so every stored draw sits exactly on the constraint manifold.
inline void center_global(Vector& v) { v.array() -= v.mean(); }

inline void center_by_component(Vector& v, const AreaGraph& graph) {
  Vector shift = Vector::Zero(graph.n_components);
  Vector count = Vector::Zero(graph.n_components);
  for (int i = 0; i < graph.n; ++i) {
    shift[graph.component[i]] += v[i];
    count[graph.component[i]] += 1.0;
  }
  for (int i = 0; i < graph.n; ++i) {
    v[i] -= shift[graph.component[i]] / count[graph.component[i]];
  }
}

}  // namespace sae::detail
