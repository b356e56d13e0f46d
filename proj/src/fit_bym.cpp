#include <utility>

#include "effects_common.hpp"
#include "gibbs_runner.hpp"
#include "sae/errors.hpp"
#include "sae/icar.hpp"
#include "sae/models.hpp"
#include "sae/samplers.hpp"

namespace sae {

namespace {

struct BymState {
  Vector beta, v1, v2;
  double sigma1_sq = 1.0, sigma2_sq = 1.0;
};

}  // namespace

PosteriorDraws fit_bym(const SurveyDataset& data, const PriorConfig& priors,
                       const McmcConfig& mcmc) {
  data.validate();
  priors.validate();
  mcmc.validate();
  if (!data.graph) {
    throw DataError(errc::missing_graph, "convolution model needs a contiguity graph");
  }
  const AreaGraph& graph = *data.graph;
  const IcarOperator icar = scale_icar(graph);
  const int n = data.n_areas();
  const int j = data.n_covariates();
  const int m = j + 2 * n;

  const Vector dinv = data.d.cwiseInverse();
  const Matrix xt_dinv = data.x.transpose() * dinv.asDiagonal();
  const Matrix xtdx = xt_dinv * data.x;
  const Matrix constraints = detail::effect_constraints(j, graph);

  // Fixed parts of the precision and linear term; only the prior diagonal
  // blocks depend on the variance parameters.
  Matrix p_base = Matrix::Zero(m, m);
  p_base.topLeftCorner(j, j) = xtdx;
  p_base.block(0, j, j, n) = xt_dinv;
  p_base.block(0, j + n, j, n) = xt_dinv;
  p_base.block(j, 0, n, j) = xt_dinv.transpose();
  p_base.block(j + n, 0, n, j) = xt_dinv.transpose();
  for (int i = 0; i < n; ++i) {
    p_base(j + i, j + i) += dinv[i];
    p_base(j + i, j + n + i) += dinv[i];
    p_base(j + n + i, j + i) += dinv[i];
    p_base(j + n + i, j + n + i) += dinv[i];
  }
  Vector b(m);
  b.head(j) = xt_dinv * data.y;
  b.segment(j, n) = dinv.cwiseProduct(data.y);
  b.segment(j + n, n) = dinv.cwiseProduct(data.y);

  PosteriorDraws out;
  out.model = ModelKind::bym;
  out.area_ids = data.area_ids;
  const int s = mcmc.iterations;
  out.beta.resize(s, j);
  out.theta.resize(s, n);
  out.u.resize(s, n);
  out.v1.resize(s, n);
  out.v2.resize(s, n);
  Vector sigma1_draws(s), sigma2_draws(s);

  detail::run_gibbs(
      mcmc,
      [&](int) {
        BymState st;
        st.beta = Vector::Zero(j);
        st.v1 = Vector::Zero(n);
        st.v2 = Vector::Zero(n);
        return st;
      },
      [&](BymState& st, RngStream& rng) {
        // (beta, v1, v2) jointly, conditioned on the sum-to-zero constraints.
        Matrix p = p_base;
        p.topLeftCorner(j, j) += Matrix::Identity(j, j) / priors.beta_prior_variance;
        p.block(j, j, n, n) += Matrix::Identity(n, n) / st.sigma1_sq;
        p.block(j + n, j + n, n, n) += icar.q_scaled / st.sigma2_sq;
        const Vector gamma =
            sample_mvn_precision_constrained(p, b, constraints, rng, "effects block");
        st.beta = gamma.head(j);
        st.v1 = gamma.segment(j, n);
        st.v2 = gamma.segment(j + n, n);
        detail::center_global(st.v1);
        detail::center_by_component(st.v2, graph);
        // Variances.
        st.sigma1_sq = sample_inverse_gamma(priors.bym_eps + 0.5 * n,
                                            priors.bym_eps + 0.5 * st.v1.squaredNorm(), rng);
        st.sigma2_sq = sample_inverse_gamma(
            priors.bym_eps + 0.5 * n,
            priors.bym_eps + 0.5 * st.v2.dot(icar.q_scaled * st.v2), rng);
      },
      [&](const BymState& st, int row) {
        out.beta.row(row) = st.beta;
        out.v1.row(row) = st.v1;
        out.v2.row(row) = st.v2;
        out.u.row(row) = (st.v1 + st.v2).transpose();
        out.theta.row(row) = (data.x * st.beta + st.v1 + st.v2).transpose();
        sigma1_draws[row] = st.sigma1_sq;
        sigma2_draws[row] = st.sigma2_sq;
      });

  out.scalars["sigma1_sq"] = std::move(sigma1_draws);
  out.scalars["sigma2_sq"] = std::move(sigma2_draws);
  return out;
}

}  // namespace sae
