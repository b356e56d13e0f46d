#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sae/types.hpp"

namespace sae::test {

// Running first/second/fourth central moments of a sample, enough to put
// Monte Carlo standard errors on both the mean and the variance.
struct SampleMoments {
  double mean = 0.0;
  double var = 0.0;    // unbiased
  double m4 = 0.0;     // fourth central moment
  std::size_t n = 0;

  double se_mean() const { return std::sqrt(var / static_cast<double>(n)); }
  // Large-sample s.e. of the sample variance.
  double se_var() const {
    const double nn = static_cast<double>(n);
    return std::sqrt((m4 - var * var * (nn - 3.0) / (nn - 1.0)) / nn);
  }
};

inline SampleMoments moments(const std::vector<double>& xs) {
  SampleMoments m;
  m.n = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  double s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  m.var = s2 / static_cast<double>(m.n - 1);
  m.m4 = s4 / static_cast<double>(m.n);
  return m;
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Sample covariance between two columns of draws.
inline double covariance_of(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double mx = mean_of(xs), my = mean_of(ys);
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (xs[i] - mx) * (ys[i] - my);
  return s / static_cast<double>(xs.size() - 1);
}

// Rook-adjacency edges of a rows x cols grid; node index is row * cols + col.
inline std::vector<std::pair<int, int>> lattice_edges(int rows, int cols) {
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return edges;
}

// Batch-means standard error of the mean of an autocorrelated chain.
inline double batch_se(const std::vector<double>& chain, int batches = 50) {
  const int b = std::max<int>(2, std::min<int>(batches, static_cast<int>(chain.size()) / 2));
  const std::size_t len = chain.size() / static_cast<std::size_t>(b);
  std::vector<double> bm(b, 0.0);
  for (int k = 0; k < b; ++k) {
    for (std::size_t t = 0; t < len; ++t) bm[k] += chain[k * len + t];
    bm[k] /= static_cast<double>(len);
  }
  const double grand = mean_of(bm);
  double s2 = 0.0;
  for (double v : bm) s2 += (v - grand) * (v - grand);
  s2 /= static_cast<double>(b - 1);
  return std::sqrt(s2 / static_cast<double>(b));
}

// Column of a draws matrix as a vector.
inline std::vector<double> column(const Matrix& m, int col) {
  std::vector<double> out(m.rows());
  for (int s = 0; s < m.rows(); ++s) out[s] = m(s, col);
  return out;
}

inline std::vector<double> to_vector(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace sae::test
