#include "sae/icar.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sae/errors.hpp"

namespace sae {

Matrix icar_precision_unscaled(const AreaGraph& graph) {
  Matrix q = Matrix::Zero(graph.n, graph.n);
  for (int i = 0; i < graph.n; ++i) q(i, i) = graph.degree[i];
  for (const auto& [i, k] : graph.edges) {
    q(i, k) = -1.0;
    q(k, i) = -1.0;
  }
  return q;
}

namespace {

struct Spectral {
  Vector eigenvalues;
  Matrix eigenvectors;
  double zero_threshold = 0.0;
};

Spectral psd_spectral(const Matrix& m, const char* what) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double sym_tol = 1e-10 * std::max(1.0, scale);
  if (((m - m.transpose()).cwiseAbs().maxCoeff()) > sym_tol) {
    throw NumericalError(errc::not_symmetric, std::string(what) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(errc::negative_eigenvalue,
                         std::string(what) + ": eigendecomposition failed");
  }
  Spectral s;
  s.eigenvalues = eig.eigenvalues();
  s.eigenvectors = eig.eigenvectors();
  const double lambda_max = std::max(0.0, s.eigenvalues[s.eigenvalues.size() - 1]);
  s.zero_threshold =
      static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * lambda_max;
  if (s.eigenvalues[0] < -s.zero_threshold) {
    throw NumericalError(errc::negative_eigenvalue,
                         std::string(what) + " has a negative eigenvalue " +
                             std::to_string(s.eigenvalues[0]));
  }
  return s;
}

Matrix pseudo_inverse_from(const Spectral& s) {
  const auto n = s.eigenvalues.size();
  Vector inv = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s.eigenvalues[i] > s.zero_threshold) inv[i] = 1.0 / s.eigenvalues[i];
  }
  return s.eigenvectors * inv.asDiagonal() * s.eigenvectors.transpose();
}

}  // namespace

Matrix generalized_inverse(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw UsageError(errc::dimension_mismatch, "generalized_inverse needs a square matrix");
  }
  return pseudo_inverse_from(psd_spectral(m, "generalized_inverse input"));
}

IcarOperator scale_icar(const AreaGraph& graph) {
  if (!graph.has_edges()) {
    throw DataError(errc::no_edges, "graph has no edges; intrinsic spatial prior is undefined");
  }
  for (int i = 0; i < graph.n; ++i) {
    if (graph.degree[i] == 0) {
      throw DataError(errc::zero_marginal_variance,
                      "area index " + std::to_string(i) +
                          " has no neighbours; its intrinsic marginal variance is zero");
    }
  }
  const Matrix q0 = icar_precision_unscaled(graph);
  const Spectral spec = psd_spectral(q0, "ICAR precision");
  const Matrix v = pseudo_inverse_from(spec);

  double log_sum = 0.0;
  for (int i = 0; i < graph.n; ++i) {
    const double vii = v(i, i);
    if (!(vii > 0.0)) {
      throw NumericalError(errc::zero_marginal_variance,
                           "non-positive marginal variance at area index " + std::to_string(i));
    }
    log_sum += std::log(vii);
  }
  const double scale = std::exp(log_sum / graph.n);

  IcarOperator op;
  op.scale = scale;
  op.q_scaled = scale * q0;
  op.q_ginv = v / scale;
  op.rank = graph.n - graph.n_components;
  op.eigenvalues = scale * spec.eigenvalues;
  op.eigenvectors = spec.eigenvectors;
  return op;
}

}  // namespace sae
