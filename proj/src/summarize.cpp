#include <algorithm>
#include <cmath>

#include "sae/draws.hpp"
#include "sae/errors.hpp"

namespace sae {

const char* model_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::fh: return "fh";
    case ModelKind::dm: return "dm";
    case ModelKind::bym: return "bym";
    case ModelKind::ssd: return "ssd";
  }
  return "unknown";
}

Matrix PosteriorDraws::theta_original() const {
  if (!standardization || !standardization->applied) return theta;
  return (theta.array() * standardization->spread + standardization->center).matrix();
}

double quantile_sorted(const std::vector<double>& sorted, double tau) {
  if (sorted.empty()) throw UsageError(errc::invalid_argument, "quantile of an empty sample");
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw UsageError(errc::invalid_argument, "quantile level must lie in [0, 1]");
  }
  const double h = (static_cast<double>(sorted.size()) - 1.0) * tau;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

std::vector<AreaSummary> summarize_matrix(const Matrix& draws, const PosteriorDraws& fit,
                                          double alpha) {
  const int s = static_cast<int>(draws.rows());
  const int n = static_cast<int>(draws.cols());
  const bool selection = fit.delta.size() > 0;
  std::vector<AreaSummary> out(n);
  std::vector<double> col(s);
  for (int i = 0; i < n; ++i) {
    AreaSummary& a = out[i];
    a.area_id = fit.area_ids[i];
    for (int t = 0; t < s; ++t) col[t] = draws(t, i);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= s;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    a.mean = mean;
    a.sd = s > 1 ? std::sqrt(ss / (s - 1)) : 0.0;
    std::sort(col.begin(), col.end());
    a.lower = quantile_sorted(col, alpha / 2.0);
    a.upper = quantile_sorted(col, 1.0 - alpha / 2.0);
    if (selection) a.selection_rate = fit.delta.col(i).mean();
  }
  return out;
}

}  // namespace

FitSummary summarize(const PosteriorDraws& draws, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw UsageError(errc::invalid_argument, "alpha must lie in (0, 1]");
  }
  if (draws.n_draws() < 1) {
    throw UsageError(errc::invalid_argument, "no retained draws to summarize");
  }
  FitSummary out;
  out.model = draws.model;
  out.alpha = alpha;
  out.has_selection = draws.delta.size() > 0;
  out.areas_modeling = summarize_matrix(draws.theta, draws, alpha);
  if (draws.standardization && draws.standardization->applied) {
    out.areas = summarize_matrix(draws.theta_original(), draws, alpha);
  } else {
    out.areas = out.areas_modeling;
  }
  out.beta_mean = draws.beta.colwise().mean();
  for (const auto& [name, values] : draws.scalars) {
    out.scalar_means[name] = values.mean();
  }
  return out;
}

}  // namespace sae
