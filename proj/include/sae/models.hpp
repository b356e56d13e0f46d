#pragma once

#include "sae/dataset.hpp"
#include "sae/draws.hpp"

namespace sae {

// Posterior probability that an area carries a random effect, given its
// selection prior p, regression residual r = y - x'beta, candidate effect v
// and sampling variance d:
//
//   logit(ptilde) = logit(p) + r v / d - v^2 / (2 d),
//
// the log Bayes factor between the "effect present" and "effect absent"
// explanations of the residual.  The log-odds are clamped to +-700 before
// the logistic; p = 0 and p = 1 are honoured exactly, and v = 0 returns p.
double selection_probability(double prior_prob, double residual, double effect,
                             double sampling_variance);

// Area-level model with one unstructured Gaussian effect per area and a flat
// prior on (beta, effect variance).  Gibbs: beta, effects, variance.
PosteriorDraws fit_fh(const SurveyDataset& data, const PriorConfig& priors,
                      const McmcConfig& mcmc);

// Two-group mixture baseline: each area either carries an unstructured
// effect or none, with a shared Beta-prior selection probability.
PosteriorDraws fit_dm(const SurveyDataset& data, const PriorConfig& priors,
                      const McmcConfig& mcmc);

// Convolution baseline: unstructured plus intrinsic spatial effect in every
// area, with near-flat inverse-gamma priors on both variances.  Requires a
// contiguity graph without isolated areas.
PosteriorDraws fit_bym(const SurveyDataset& data, const PriorConfig& priors,
                       const McmcConfig& mcmc);

// Spatially selected and dependent effects: every area carries a latent
// unstructured-plus-spatial effect, switched on per area by an indicator
// whose prior field is itself unstructured-plus-spatial on the logit scale
// (fitted with Polya-Gamma augmentation).  The response is standardized
// internally; summaries are back-transformed.  Requires a contiguity graph.
PosteriorDraws fit_ssd(const SurveyDataset& data, const PriorConfig& priors,
                       const McmcConfig& mcmc);

}  // namespace sae
