#include "sae/dataset.hpp"

#include <cmath>
#include <unordered_set>

#include "sae/errors.hpp"

namespace sae {

void SurveyDataset::validate() const {
  const int n = n_areas();
  if (n < 1) {
    throw DataError(errc::too_few_areas, "dataset has no areas");
  }
  if (static_cast<int>(area_ids.size()) != n || d.size() != n || x.rows() != n) {
    throw DataError(errc::dimension_mismatch, "area_ids, y, d and x must agree on the number of areas");
  }
  if (x.cols() < 1) {
    throw DataError(errc::dimension_mismatch, "design matrix needs at least one column");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : area_ids) {
    if (!seen.insert(id).second) {
      throw DataError(errc::duplicate_area_id, "duplicate area id '" + id + "'");
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) {
      throw DataError(errc::non_numeric_cell, "non-finite estimate for area '" + area_ids[i] + "'");
    }
    if (!std::isfinite(d[i]) || d[i] <= 0.0) {
      throw DataError(errc::non_positive_variance,
                      "sampling variance for area '" + area_ids[i] + "' must be positive and finite");
    }
    for (int c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(i, c))) {
        throw DataError(errc::non_numeric_cell,
                        "non-finite covariate " + std::to_string(c) + " for area '" + area_ids[i] + "'");
      }
    }
  }
  if (n >= x.cols()) {
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < x.cols()) {
      throw DataError(errc::rank_deficient_design, "design matrix is rank deficient");
    }
  } else {
    throw DataError(errc::too_few_areas, "fewer areas than covariates");
  }
  if (graph && graph->n != n) {
    throw DataError(errc::dimension_mismatch, "graph size does not match the number of areas");
  }
}

std::pair<SurveyDataset, StandardizationRecord> standardize(const SurveyDataset& data) {
  data.validate();
  const int n = data.n_areas();
  if (n < 2) {
    throw DataError(errc::too_few_areas, "standardization needs at least two areas");
  }
  const double mean = data.y.mean();
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = data.y[i] - mean;
    ss += c * c;
  }
  const double var = ss / (n - 1);
  if (var == 0.0) {
    throw DataError(errc::constant_response, "direct estimates are constant; cannot standardize");
  }
  StandardizationRecord rec;
  rec.center = mean;
  rec.spread = std::sqrt(var);
  rec.applied = true;

  SurveyDataset out = data;
  out.y = (data.y.array() - mean) / rec.spread;
  out.d = data.d / var;
  return {std::move(out), rec};
}

void PriorConfig::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(beta_prior_variance) || !pos(sigma1_shape) || !pos(sigma1_scale) ||
      !pos(sigma2_shape) || !pos(sigma2_scale) || !pos(s1_shape) || !pos(s1_scale) ||
      !pos(s2_shape) || !pos(s2_scale) || !pos(dm_sigma_shape) || !pos(dm_p_a) ||
      !pos(dm_p_b) || !pos(bym_eps) || (dm_sigma_scale && !pos(*dm_sigma_scale))) {
    throw UsageError(errc::invalid_hyperparameter, "prior hyperparameters must be positive and finite");
  }
}

void McmcConfig::validate() const {
  if (iterations < 1) throw UsageError(errc::invalid_argument, "iterations must be at least 1");
  if (burn_in < 0) throw UsageError(errc::invalid_argument, "burn_in must be non-negative");
  if (thin < 1) throw UsageError(errc::invalid_argument, "thin must be at least 1");
  if (chains < 1) throw UsageError(errc::invalid_argument, "chains must be at least 1");
}

}  // namespace sae
