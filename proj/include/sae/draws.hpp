#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sae/dataset.hpp"
#include "sae/types.hpp"

namespace sae {

enum class ModelKind { fh, dm, bym, ssd };

const char* model_name(ModelKind kind) noexcept;

// Retained posterior draws from one fit.  Every matrix has one row per
// retained draw; matrices that do not apply to the model are 0 x 0.
// Invariant: theta.row(s) = x * beta.row(s) + u.row(s) on the modeling scale
// (the standardized scale when `standardization` is set).
struct PosteriorDraws {
  ModelKind model = ModelKind::fh;
  std::vector<std::string> area_ids;
  Matrix beta;   // S x j
  Matrix theta;  // S x n small-area means, modeling scale
  Matrix u;      // S x n composed area effect
  Matrix v1;     // S x n unstructured effect (bym, ssd)
  Matrix v2;     // S x n spatial effect (bym, ssd)
  Matrix delta;  // S x n selection indicators in {0,1} (dm, ssd)
  Matrix p;      // ssd: S x n selection probabilities; dm: S x 1 shared probability
  Matrix psi1;   // S x n selection-field components (ssd)
  Matrix psi2;
  std::map<std::string, Vector> scalars;  // variance draws keyed by name
  std::optional<StandardizationRecord> standardization;

  int n_draws() const { return static_cast<int>(theta.rows()); }
  int n_areas() const { return static_cast<int>(theta.cols()); }

  // Per-draw back-transform of theta to the original response scale.
  Matrix theta_original() const;
};

// Lower/upper quantile by linear interpolation of order statistics:
// h = (S - 1) * tau, q = s[floor(h)] + (h - floor(h)) * (s[floor(h)+1] - s[floor(h)]).
// `sorted` must be ascending; tau in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double tau);

struct AreaSummary {
  std::string area_id;
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;  // alpha/2 quantile
  double upper = 0.0;  // 1 - alpha/2 quantile
  double selection_rate = 0.0;  // posterior mean of delta, when the model has one
};

struct FitSummary {
  ModelKind model = ModelKind::fh;
  double alpha = 0.10;
  bool has_selection = false;
  std::vector<AreaSummary> areas;           // original response scale
  std::vector<AreaSummary> areas_modeling;  // modeling (possibly standardized) scale
  Vector beta_mean;
  std::map<std::string, double> scalar_means;
};

// Posterior means, sds and central (1 - alpha) intervals per area.
// alpha = 1 collapses the interval to the posterior median.
FitSummary summarize(const PosteriorDraws& draws, double alpha);

}  // namespace sae
