#include <algorithm>
#include <cmath>

#include "sae/errors.hpp"
#include "sae/models.hpp"

namespace sae {

double selection_probability(double prior_prob, double residual, double effect,
                             double sampling_variance) {
  if (!(prior_prob >= 0.0 && prior_prob <= 1.0)) {
    throw NumericalError(errc::invalid_probability, "selection prior outside [0, 1]");
  }
  if (!std::isfinite(residual) || !std::isfinite(effect)) {
    throw NumericalError(errc::non_finite_tilt, "non-finite residual or effect");
  }
  if (!(sampling_variance > 0.0) || !std::isfinite(sampling_variance)) {
    throw UsageError(errc::invalid_hyperparameter, "sampling variance must be positive and finite");
  }
  if (prior_prob == 0.0) return 0.0;
  if (prior_prob == 1.0) return 1.0;
  if (effect == 0.0) return prior_prob;

  const double prior_logit = std::log(prior_prob) - std::log1p(-prior_prob);
  double logit = prior_logit + residual * effect / sampling_variance -
                 effect * effect / (2.0 * sampling_variance);
  logit = std::clamp(logit, -700.0, 700.0);
  return 1.0 / (1.0 + std::exp(-logit));
}

}  // namespace sae
