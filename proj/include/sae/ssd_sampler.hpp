#pragma once

#include <vector>

#include "sae/dataset.hpp"
#include "sae/icar.hpp"
#include "sae/rng.hpp"
#include "sae/types.hpp"

namespace sae {

// Blocked Gibbs sampler for the spatially-selected-effects model on data
// that is already on the modeling (standardized) scale:
//
//   y_i     ~ N(x_i' beta + delta_i (v1_i + v2_i), d_i)
//   v1      ~ N(0, sigma1^2 I),   v2 ~ N(0, sigma2^2 Q^-)        (sum-to-zero)
//   delta_i ~ Bernoulli(p_i),     logit(p_i) = psi1_i + psi2_i
//   psi1    ~ N(0, s1^2 I),       psi2 ~ N(0, s2^2 Q^-)          (sum-to-zero)
//
// with inverse-gamma priors on the four variances and N(0, k^2 I) on beta.
// The indicator field is sampled by Polya-Gamma augmentation.  Each cycle
// draws, in order: the (beta, v1, v2) block under its sum-to-zero
// constraints, the indicators, the PG latents, the (psi1, psi2) block under
// its constraint, and the variances.
//
// The individual updates are public so each conditional can be verified in
// isolation against its closed form.
class SsdSampler {
 public:
  SsdSampler(SurveyDataset data, IcarOperator icar, PriorConfig priors);

  struct State {
    Vector beta, v1, v2, psi1, psi2, w;
    std::vector<int> delta;
    double sigma1_sq = 1.0, sigma2_sq = 1.0, s1_sq = 1.0, s2_sq = 1.0;
  };

  // Reference initialization: zero coefficients and fields, all indicators
  // on, unit variances, PG(1, 0) latents.
  void init_state(RngStream& rng);

  void iterate(RngStream& rng);

  void update_effects(RngStream& rng);
  void update_selection(RngStream& rng);
  void update_pg_latents(RngStream& rng);
  void update_field(RngStream& rng);
  void update_variances(RngStream& rng);

  State& state() { return state_; }
  const State& state() const { return state_; }

  // Stacked (beta, v1, v2) precision and linear term at the current state,
  // assembled as if every coordinate were drawn jointly.
  Matrix effects_precision() const;
  Vector effects_linear() const;
  // Stacked (psi1, psi2) precision and linear term at the current state.
  Matrix field_precision() const;
  Vector field_linear() const;

  // Selection prior probabilities logistic(psi1 + psi2).
  Vector selection_priors() const;
  // Small-area means x beta + delta .* (v1 + v2).
  Vector theta() const;

  const SurveyDataset& data() const { return data_; }
  const IcarOperator& icar() const { return icar_; }

 private:
  SurveyDataset data_;
  IcarOperator icar_;
  PriorConfig priors_;
  State state_;

  Vector dinv_;
  Matrix xt_dinv_;            // j x n
  Matrix effect_constraints_;  // rows: v1 global, v2 per component
  Matrix field_constraints_;   // rows: psi2 per component
  Matrix spatial_prior_factor_;  // F with F F' = q_ginv, for inactive components
};

}  // namespace sae
