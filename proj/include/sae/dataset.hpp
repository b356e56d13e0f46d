#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sae/area_graph.hpp"
#include "sae/types.hpp"

namespace sae {

// Area-level survey input: direct estimates with known sampling variances
// and an area-level design matrix, plus an optional contiguity graph for the
// spatially structured models.
struct SurveyDataset {
  std::vector<std::string> area_ids;
  Vector y;  // direct estimates on the modeling scale
  Vector d;  // sampling variances of y, strictly positive
  Matrix x;  // n x j design matrix (include an intercept column yourself)
  std::optional<AreaGraph> graph;

  int n_areas() const { return static_cast<int>(y.size()); }
  int n_covariates() const { return static_cast<int>(x.cols()); }

  // Checks sizes, id uniqueness, finiteness, d > 0, and full column rank of
  // the design.  Throws DataError.
  void validate() const;
};

// Affine transform that was applied to y (and quadratically to d).
struct StandardizationRecord {
  double center = 0.0;
  double spread = 1.0;
  bool applied = false;

  double to_original(double value) const { return value * spread + center; }
  double to_standardized(double value) const { return (value - center) / spread; }
};

// Center and scale y to mean zero and unit sample variance, dividing d by
// the sample variance of y so that signal-to-noise is preserved.
std::pair<SurveyDataset, StandardizationRecord> standardize(const SurveyDataset& data);

// Hyperparameters for all four model fits.  Defaults are the recommended
// weakly-informative settings for standardized data.
struct PriorConfig {
  double beta_prior_variance = 1e4;  // k^2: N(0, k^2 I) on regression coefficients

  // Selected-effects model: inverse-gamma (shape, scale) on the effect and
  // selection-field variances.
  double sigma1_shape = 5.0, sigma1_scale = 5.0;  // unstructured effect
  double sigma2_shape = 5.0, sigma2_scale = 5.0;  // spatial effect
  double s1_shape = 5.0, s1_scale = 10.0;         // unstructured selection field
  double s2_shape = 5.0, s2_scale = 10.0;         // spatial selection field

  // Two-group mixture baseline.
  double dm_sigma_shape = 3.0;
  std::optional<double> dm_sigma_scale;  // default: 2 * mean(d), resolved at fit time
  double dm_p_a = 1.0, dm_p_b = 1.0;     // Beta prior on the shared selection probability

  // Convolution baseline: IG(eps, eps) on both variance components.
  double bym_eps = 5e-5;

  void validate() const;
};

// Chain layout for a Gibbs run.  `iterations` counts retained draws after
// burn-in and thinning, pooled across chains.
struct McmcConfig {
  int iterations = 2000;
  int burn_in = 2000;
  int thin = 1;
  int chains = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace sae
