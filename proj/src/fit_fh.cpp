#include <cmath>

#include "gibbs_runner.hpp"
#include "sae/errors.hpp"
#include "sae/models.hpp"
#include "sae/samplers.hpp"

namespace sae {

namespace {

struct FhState {
  Vector beta, u;
  double sigma_sq = 1.0;
};

}  // namespace

PosteriorDraws fit_fh(const SurveyDataset& data, const PriorConfig& priors,
                      const McmcConfig& mcmc) {
  data.validate();
  priors.validate();
  mcmc.validate();
  const int n = data.n_areas();
  const int j = data.n_covariates();
  if (n <= j + 2) {
    throw DataError(errc::too_few_areas,
                    "need more than covariates + 2 areas for a proper effect-variance posterior");
  }

  const Vector dinv = data.d.cwiseInverse();
  const Matrix xt_dinv = data.x.transpose() * dinv.asDiagonal();  // j x n
  const Matrix xtdx = xt_dinv * data.x;                           // j x j

  PosteriorDraws out;
  out.model = ModelKind::fh;
  out.area_ids = data.area_ids;
  const int s = mcmc.iterations;
  out.beta.resize(s, j);
  out.theta.resize(s, n);
  out.u.resize(s, n);
  Vector sigma_draws(s);

  detail::run_gibbs(
      mcmc,
      [&](int) {
        FhState st;
        st.beta = Vector::Zero(j);
        st.u = Vector::Zero(n);
        st.sigma_sq = 1.0;
        return st;
      },
      [&](FhState& st, RngStream& rng) {
        // beta | u (flat prior)
        const Vector b = xt_dinv * (data.y - st.u);
        st.beta = sample_mvn_precision(xtdx, b, rng, "regression block");
        // u_i | beta, sigma^2: independent normals
        const Vector xb = data.x * st.beta;
        for (int i = 0; i < n; ++i) {
          const double prec = dinv[i] + 1.0 / st.sigma_sq;
          const double mean = (data.y[i] - xb[i]) * dinv[i] / prec;
          st.u[i] = mean + rng.normal() / std::sqrt(prec);
        }
        // sigma^2 | u under the flat prior: IG(n/2 - 1, u'u / 2)
        const double rate = std::max(0.5 * st.u.squaredNorm(), 1e-300);
        st.sigma_sq = sample_inverse_gamma(0.5 * n - 1.0, rate, rng);
      },
      [&](const FhState& st, int row) {
        out.beta.row(row) = st.beta;
        out.u.row(row) = st.u;
        out.theta.row(row) = (data.x * st.beta + st.u).transpose();
        sigma_draws[row] = st.sigma_sq;
      });

  out.scalars["sigma_fh_sq"] = std::move(sigma_draws);
  return out;
}

}  // namespace sae
