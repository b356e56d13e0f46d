#include <cmath>
#include <vector>

#include "gibbs_runner.hpp"
#include "sae/errors.hpp"
#include "sae/models.hpp"
#include "sae/samplers.hpp"

namespace sae {

namespace {

struct DmState {
  Vector beta, v;
  std::vector<int> delta;
  double p = 0.5;
  double sigma_sq = 1.0;
};

}  // namespace

PosteriorDraws fit_dm(const SurveyDataset& data, const PriorConfig& priors,
                      const McmcConfig& mcmc) {
  data.validate();
  priors.validate();
  mcmc.validate();
  const int n = data.n_areas();
  const int j = data.n_covariates();

  const double sigma_scale = priors.dm_sigma_scale.value_or(2.0 * data.d.mean());
  const Vector dinv = data.d.cwiseInverse();
  const Matrix xt_dinv = data.x.transpose() * dinv.asDiagonal();
  const Matrix xtdx = xt_dinv * data.x;

  PosteriorDraws out;
  out.model = ModelKind::dm;
  out.area_ids = data.area_ids;
  const int s = mcmc.iterations;
  out.beta.resize(s, j);
  out.theta.resize(s, n);
  out.u.resize(s, n);
  out.delta.resize(s, n);
  out.p.resize(s, 1);
  Vector sigma_draws(s);

  detail::run_gibbs(
      mcmc,
      [&](int) {
        DmState st;
        st.beta = Vector::Zero(j);
        st.v = Vector::Zero(n);
        st.delta.assign(n, 1);
        st.p = 0.5;
        st.sigma_sq = 1.0;
        return st;
      },
      [&](DmState& st, RngStream& rng) {
        const Vector xb = data.x * st.beta;
        // delta_i | v, beta, p: two-density posterior odds per area.
        for (int i = 0; i < n; ++i) {
          const double ptilde =
              selection_probability(st.p, data.y[i] - xb[i], st.v[i], data.d[i]);
          st.delta[i] = sample_bernoulli(ptilde, rng);
        }
        // p | delta
        int n_sel = 0;
        for (int d : st.delta) n_sel += d;
        st.p = sample_beta(priors.dm_p_a + n_sel, priors.dm_p_b + (n - n_sel), rng);
        // v_i | delta_i = 1 (effects of unselected areas are refreshed below)
        for (int i = 0; i < n; ++i) {
          if (st.delta[i] == 0) continue;
          const double prec = dinv[i] + 1.0 / st.sigma_sq;
          const double mean = (data.y[i] - xb[i]) * dinv[i] / prec;
          st.v[i] = mean + rng.normal() / std::sqrt(prec);
        }
        // beta | delta, v (flat prior): regress y minus the active effects.
        Vector resid = data.y;
        for (int i = 0; i < n; ++i) {
          if (st.delta[i] == 1) resid[i] -= st.v[i];
        }
        st.beta = sample_mvn_precision(xtdx, xt_dinv * resid, rng, "regression block");
        // (sigma^2, inactive effects) as one block: the variance sees only
        // active effects; inactive ones are then refreshed from the prior.
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
          if (st.delta[i] == 1) ss += st.v[i] * st.v[i];
        }
        st.sigma_sq =
            sample_inverse_gamma(priors.dm_sigma_shape + 0.5 * n_sel, sigma_scale + 0.5 * ss, rng);
        const double sd = std::sqrt(st.sigma_sq);
        for (int i = 0; i < n; ++i) {
          if (st.delta[i] == 0) st.v[i] = sd * rng.normal();
        }
      },
      [&](const DmState& st, int row) {
        out.beta.row(row) = st.beta;
        for (int i = 0; i < n; ++i) {
          const double active = st.delta[i] == 1 ? st.v[i] : 0.0;
          out.u(row, i) = active;
          out.delta(row, i) = st.delta[i];
        }
        out.theta.row(row) = (data.x * st.beta).transpose() + out.u.row(row);
        out.p(row, 0) = st.p;
        sigma_draws[row] = st.sigma_sq;
      });

  out.scalars["sigma_dm_sq"] = std::move(sigma_draws);
  return out;
}

}  // namespace sae
