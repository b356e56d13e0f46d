#include "sae/ssd_sampler.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "effects_common.hpp"
#include "gibbs_runner.hpp"
#include "sae/errors.hpp"
#include "sae/models.hpp"
#include "sae/samplers.hpp"

namespace sae {

namespace {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SsdSampler::SsdSampler(SurveyDataset data, IcarOperator icar, PriorConfig priors)
    : data_(std::move(data)), icar_(std::move(icar)), priors_(std::move(priors)) {
  const int n = data_.n_areas();
  dinv_ = data_.d.cwiseInverse();
  xt_dinv_ = data_.x.transpose() * dinv_.asDiagonal();
  effect_constraints_ = detail::effect_constraints(data_.n_covariates(), *data_.graph);
  field_constraints_ = detail::field_constraints(*data_.graph);

  // Square root of the scaled intrinsic covariance: F F' = q_ginv.  Columns
  // for null eigenvalues vanish, so F z is automatically orthogonal to the
  // per-component constants.
  const double lambda_max = icar_.eigenvalues[icar_.eigenvalues.size() - 1];
  const double threshold = n * std::numeric_limits<double>::epsilon() * lambda_max;
  Vector inv_sqrt = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (icar_.eigenvalues[i] > threshold) inv_sqrt[i] = 1.0 / std::sqrt(icar_.eigenvalues[i]);
  }
  spatial_prior_factor_ = icar_.eigenvectors * inv_sqrt.asDiagonal();
}

void SsdSampler::init_state(RngStream& rng) {
  const int n = data_.n_areas();
  state_.beta = Vector::Zero(data_.n_covariates());
  state_.v1 = Vector::Zero(n);
  state_.v2 = Vector::Zero(n);
  state_.psi1 = Vector::Zero(n);
  state_.psi2 = Vector::Zero(n);
  state_.delta.assign(n, 1);
  state_.sigma1_sq = state_.sigma2_sq = state_.s1_sq = state_.s2_sq = 1.0;
  state_.w.resize(n);
  for (int i = 0; i < n; ++i) state_.w[i] = sample_pg1(0.0, rng);
}

Matrix SsdSampler::effects_precision() const {
  const int n = data_.n_areas();
  const int j = data_.n_covariates();
  const int m = j + 2 * n;
  Matrix p = Matrix::Zero(m, m);
  p.topLeftCorner(j, j) =
      xt_dinv_ * data_.x + Matrix::Identity(j, j) / priors_.beta_prior_variance;
  for (int i = 0; i < n; ++i) {
    if (state_.delta[i] == 1) {
      for (int c = 0; c < j; ++c) {
        p(c, j + i) = xt_dinv_(c, i);
        p(c, j + n + i) = xt_dinv_(c, i);
        p(j + i, c) = xt_dinv_(c, i);
        p(j + n + i, c) = xt_dinv_(c, i);
      }
      p(j + i, j + i) += dinv_[i];
      p(j + i, j + n + i) += dinv_[i];
      p(j + n + i, j + i) += dinv_[i];
      p(j + n + i, j + n + i) += dinv_[i];
    }
    p(j + i, j + i) += 1.0 / state_.sigma1_sq;
  }
  p.bottomRightCorner(n, n) += icar_.q_scaled / state_.sigma2_sq;
  return p;
}

Vector SsdSampler::effects_linear() const {
  const int n = data_.n_areas();
  const int j = data_.n_covariates();
  Vector b = Vector::Zero(j + 2 * n);
  b.head(j) = xt_dinv_ * data_.y;
  for (int i = 0; i < n; ++i) {
    if (state_.delta[i] == 1) {
      b[j + i] = dinv_[i] * data_.y[i];
      b[j + n + i] = dinv_[i] * data_.y[i];
    }
  }
  return b;
}

Matrix SsdSampler::field_precision() const {
  const int n = data_.n_areas();
  Matrix p = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    p(i, i) = state_.w[i] + 1.0 / state_.s1_sq;
    p(i, n + i) = state_.w[i];
    p(n + i, i) = state_.w[i];
    p(n + i, n + i) = state_.w[i];
  }
  p.bottomRightCorner(n, n) += icar_.q_scaled / state_.s2_sq;
  return p;
}

Vector SsdSampler::field_linear() const {
  const int n = data_.n_areas();
  Vector b(2 * n);
  for (int i = 0; i < n; ++i) {
    const double kappa = state_.delta[i] - 0.5;
    b[i] = kappa;
    b[n + i] = kappa;
  }
  return b;
}

Vector SsdSampler::selection_priors() const {
  const int n = data_.n_areas();
  Vector p(n);
  for (int i = 0; i < n; ++i) p[i] = logistic(state_.psi1[i] + state_.psi2[i]);
  return p;
}

Vector SsdSampler::theta() const {
  Vector t = data_.x * state_.beta;
  for (int i = 0; i < data_.n_areas(); ++i) {
    if (state_.delta[i] == 1) t[i] += state_.v1[i] + state_.v2[i];
  }
  return t;
}

void SsdSampler::update_effects(RngStream& rng) {
  const int n = data_.n_areas();
  const int j = data_.n_covariates();
  const AreaGraph& graph = *data_.graph;

  bool any_active = false;
  std::vector<char> comp_active(graph.n_components, 0);
  for (int i = 0; i < n; ++i) {
    if (state_.delta[i] == 1) {
      any_active = true;
      comp_active[graph.component[i]] = 1;
    }
  }

  if (!any_active) {
    // With every indicator off the effects drop out of the likelihood: the
    // coefficients get their ridge posterior and the effects are pinned at
    // their constrained prior mode.
    const Matrix p =
        xt_dinv_ * data_.x + Matrix::Identity(j, j) / priors_.beta_prior_variance;
    state_.beta = sample_mvn_precision(p, xt_dinv_ * data_.y, rng, "coefficient block");
    state_.v1.setZero();
    state_.v2.setZero();
    return;
  }

  const Matrix p_full = effects_precision();
  const Vector b_full = effects_linear();

  bool all_active = true;
  for (char c : comp_active) all_active &= (c == 1);

  if (all_active) {
    const Vector gamma = sample_mvn_precision_constrained(p_full, b_full, effect_constraints_,
                                                          rng, "effects block");
    state_.beta = gamma.head(j);
    state_.v1 = gamma.segment(j, n);
    state_.v2 = gamma.segment(j + n, n);
    detail::center_global(state_.v1);
    detail::center_by_component(state_.v2, graph);
    return;
  }

  // Components with no active area decouple exactly: their spatial block has
  // no likelihood term and no cross-component precision, so they are drawn
  // from the constrained intrinsic prior while the rest form a reduced block.
  std::vector<int> keep;
  keep.reserve(j + 2 * n);
  for (int c = 0; c < j + n; ++c) keep.push_back(c);  // beta and all of v1
  for (int i = 0; i < n; ++i) {
    if (comp_active[graph.component[i]]) keep.push_back(j + n + i);
  }
  const int mr = static_cast<int>(keep.size());
  Matrix p_red(mr, mr);
  Vector b_red(mr);
  for (int r = 0; r < mr; ++r) {
    b_red[r] = b_full[keep[r]];
    for (int c = 0; c < mr; ++c) p_red(r, c) = p_full(keep[r], keep[c]);
  }
  int active_components = 0;
  for (char c : comp_active) active_components += c;
  Matrix a_red = Matrix::Zero(1 + active_components, mr);
  {
    std::vector<int> comp_row(graph.n_components, -1);
    int next = 1;
    for (int c = 0; c < graph.n_components; ++c) {
      if (comp_active[c]) comp_row[c] = next++;
    }
    for (int r = 0; r < mr; ++r) {
      const int col = keep[r];
      if (col >= j && col < j + n) a_red(0, r) = 1.0;
      if (col >= j + n) a_red(comp_row[graph.component[col - j - n]], r) = 1.0;
    }
  }
  const Vector gamma = sample_mvn_precision_constrained(p_red, b_red, a_red, rng, "effects block");
  state_.beta = gamma.head(j);
  state_.v1 = gamma.segment(j, n);

  // Prior draw for the inactive components' spatial coordinates; F z already
  // sums to zero within every component.
  Vector zdraw(n);
  for (int i = 0; i < n; ++i) zdraw[i] = rng.normal();
  const Vector v2_prior = std::sqrt(state_.sigma2_sq) * (spatial_prior_factor_ * zdraw);
  int at = j + n;
  for (int i = 0; i < n; ++i) {
    if (comp_active[graph.component[i]]) {
      state_.v2[i] = gamma[at++];
    } else {
      state_.v2[i] = v2_prior[i];
    }
  }
  detail::center_global(state_.v1);
  detail::center_by_component(state_.v2, graph);
}

void SsdSampler::update_selection(RngStream& rng) {
  const int n = data_.n_areas();
  const Vector xb = data_.x * state_.beta;
  for (int i = 0; i < n; ++i) {
    const double prior = logistic(state_.psi1[i] + state_.psi2[i]);
    const double ptilde = selection_probability(prior, data_.y[i] - xb[i],
                                                state_.v1[i] + state_.v2[i], data_.d[i]);
    state_.delta[i] = sample_bernoulli(ptilde, rng);
  }
}

void SsdSampler::update_pg_latents(RngStream& rng) {
  for (int i = 0; i < data_.n_areas(); ++i) {
    state_.w[i] = sample_pg1(state_.psi1[i] + state_.psi2[i], rng);
  }
}

void SsdSampler::update_field(RngStream& rng) {
  const int n = data_.n_areas();
  const Vector psi = sample_mvn_precision_constrained(field_precision(), field_linear(),
                                                      field_constraints_, rng, "selection field");
  state_.psi1 = psi.head(n);
  state_.psi2 = psi.tail(n);
  detail::center_by_component(state_.psi2, *data_.graph);
}

void SsdSampler::update_variances(RngStream& rng) {
  const double half_n = 0.5 * data_.n_areas();
  state_.sigma1_sq = sample_inverse_gamma(
      priors_.sigma1_shape + half_n, priors_.sigma1_scale + 0.5 * state_.v1.squaredNorm(), rng);
  state_.sigma2_sq = sample_inverse_gamma(
      priors_.sigma2_shape + half_n,
      priors_.sigma2_scale + 0.5 * state_.v2.dot(icar_.q_scaled * state_.v2), rng);
  state_.s1_sq = sample_inverse_gamma(
      priors_.s1_shape + half_n, priors_.s1_scale + 0.5 * state_.psi1.squaredNorm(), rng);
  state_.s2_sq = sample_inverse_gamma(
      priors_.s2_shape + half_n,
      priors_.s2_scale + 0.5 * state_.psi2.dot(icar_.q_scaled * state_.psi2), rng);
}

void SsdSampler::iterate(RngStream& rng) {
  update_effects(rng);
  update_selection(rng);
  update_pg_latents(rng);
  update_field(rng);
  update_variances(rng);
}

PosteriorDraws fit_ssd(const SurveyDataset& data, const PriorConfig& priors,
                       const McmcConfig& mcmc) {
  data.validate();
  priors.validate();
  mcmc.validate();
  if (!data.graph) {
    throw DataError(errc::missing_graph, "selected-effects model needs a contiguity graph");
  }
  auto [std_data, record] = standardize(data);
  const IcarOperator icar = scale_icar(*std_data.graph);
  const int n = std_data.n_areas();
  const int j = std_data.n_covariates();

  PosteriorDraws out;
  out.model = ModelKind::ssd;
  out.area_ids = std_data.area_ids;
  out.standardization = record;
  const int s = mcmc.iterations;
  out.beta.resize(s, j);
  out.theta.resize(s, n);
  out.u.resize(s, n);
  out.v1.resize(s, n);
  out.v2.resize(s, n);
  out.delta.resize(s, n);
  out.p.resize(s, n);
  out.psi1.resize(s, n);
  out.psi2.resize(s, n);
  Vector sigma1_draws(s), sigma2_draws(s), s1_draws(s), s2_draws(s);

  detail::run_gibbs(
      mcmc,
      [&](int chain) {
        SsdSampler sampler(std_data, icar, priors);
        RngStream init_rng(derive_seed(mcmc.seed, 0x55d0), static_cast<std::uint64_t>(chain));
        sampler.init_state(init_rng);
        return sampler;
      },
      [&](SsdSampler& sampler, RngStream& rng) { sampler.iterate(rng); },
      [&](const SsdSampler& sampler, int row) {
        const auto& st = sampler.state();
        out.beta.row(row) = st.beta;
        out.v1.row(row) = st.v1;
        out.v2.row(row) = st.v2;
        out.psi1.row(row) = st.psi1;
        out.psi2.row(row) = st.psi2;
        out.theta.row(row) = sampler.theta().transpose();
        for (int i = 0; i < n; ++i) {
          out.delta(row, i) = st.delta[i];
          out.u(row, i) = st.delta[i] == 1 ? st.v1[i] + st.v2[i] : 0.0;
        }
        out.p.row(row) = sampler.selection_priors().transpose();
        sigma1_draws[row] = st.sigma1_sq;
        sigma2_draws[row] = st.sigma2_sq;
        s1_draws[row] = st.s1_sq;
        s2_draws[row] = st.s2_sq;
      });

  out.scalars["sigma1_sq"] = std::move(sigma1_draws);
  out.scalars["sigma2_sq"] = std::move(sigma2_draws);
  out.scalars["s1_sq"] = std::move(s1_draws);
  out.scalars["s2_sq"] = std::move(s2_draws);
  return out;
}

}  // namespace sae
