#include "sae/samplers.hpp"

#include <cmath>
#include <string>

#include "sae/errors.hpp"

namespace sae {

namespace {

// Truncation point splitting the PG proposal into its two pieces.  0.64 is
// near-optimal for the acceptance rate and is the customary choice.
constexpr double kPgTrunc = 0.64;
constexpr double kPi = 3.141592653589793238462643383279502884;

// n-th term of the alternating series for the J*(1, z) density, evaluated in
// the left (x <= t) or right (x > t) representation.
double pg_series_term(int n, double x) {
  const double np = n + 0.5;
  double logf = std::log(kPi) + std::log(np);
  if (x <= kPgTrunc) {
    logf += 1.5 * (std::log(2.0 / kPi) - std::log(x)) - 2.0 * np * np / x;
  } else {
    logf += -0.5 * x * kPi * kPi * np * np;
  }
  return std::exp(logf);
}

// One draw from the inverse-Gaussian(mu, 1) distribution by the
// Michael-Schucany-Haas transformation method.
double inverse_gaussian(double mu, RngStream& rng) {
  const double u = rng.normal();
  const double v = u * u;
  double out = mu + 0.5 * mu * mu * v - 0.5 * mu * std::sqrt(4.0 * mu * v + mu * mu * v * v);
  if (rng.uniform01() > mu / (mu + out)) out = mu * mu / out;
  return out;
}

// Inverse-Gaussian(1/z, 1) truncated to (0, t].  For small 1/z, rejection
// from the untruncated sampler; otherwise a chi-square-based scheme whose
// proposals already live in (0, t].
double truncated_inverse_gaussian(double z, RngStream& rng) {
  const double t = kPgTrunc;
  if (z < 1.0 / t) {
    // Covers z = 0 as well: sample 1/X ~ truncated chi-square, then tilt.
    for (;;) {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / t);
      const double x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      if (z == 0.0 || rng.uniform01() <= std::exp(-0.5 * z * z * x)) return x;
    }
  }
  const double mu = 1.0 / z;
  for (;;) {
    const double x = inverse_gaussian(mu, rng);
    if (x <= t && x > 0.0) return x;
  }
}

}  // namespace

double norm_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double sample_pg1(double c, RngStream& rng) {
  if (!std::isfinite(c)) {
    throw NumericalError(errc::non_finite_tilt, "PG(1, c) tilt is not finite");
  }
  const double z = 0.5 * std::fabs(c);
  const double t = kPgTrunc;

  // Mass of the exponential piece of the proposal relative to the
  // inverse-Gaussian piece.
  const double fz = kPi * kPi / 8.0 + z * z / 2.0;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + std::log(norm_cdf(b));
  const double xa = x0 + z + std::log(norm_cdf(a));
  const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  const double p_exp_piece = 1.0 / (1.0 + qdivp);

  for (;;) {
    double x;
    if (rng.uniform01() < p_exp_piece) {
      x = t + rng.exponential() / fz;
    } else {
      x = truncated_inverse_gaussian(z, rng);
    }
    // Squeeze on the alternating series: accept as soon as a lower partial
    // sum dominates, reject as soon as an upper one is undershot.
    double s = pg_series_term(0, x);
    const double y = rng.uniform01() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= pg_series_term(n, x);
        if (y <= s) return x / 4.0;
      } else {
        s += pg_series_term(n, x);
        if (y > s) break;
      }
    }
  }
}

namespace {

std::string block_label(std::string_view block) {
  return block.empty() ? std::string("gaussian conditional") : std::string(block);
}

}  // namespace

Vector sample_mvn_precision(const Matrix& precision, const Vector& linear,
                            RngStream& rng, std::string_view block) {
  if (precision.rows() != precision.cols() || precision.rows() != linear.size()) {
    throw UsageError(errc::dimension_mismatch, "precision/linear size mismatch in " + block_label(block));
  }
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(errc::not_positive_definite,
                         "precision matrix not positive definite in " + block_label(block));
  }
  const Vector mean = llt.solve(linear);
  Vector zdraw(linear.size());
  for (Eigen::Index i = 0; i < zdraw.size(); ++i) zdraw[i] = rng.normal();
  // Solve L^T x = z so that x has covariance P^{-1}.
  const Vector fluct = llt.matrixU().solve(zdraw);
  return mean + fluct;
}

Vector sample_mvn_precision_constrained(const Matrix& precision, const Vector& linear,
                                        const Matrix& constraints, RngStream& rng,
                                        std::string_view block) {
  if (constraints.cols() != precision.rows()) {
    throw UsageError(errc::dimension_mismatch, "constraint width mismatch in " + block_label(block));
  }
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(errc::not_positive_definite,
                         "precision matrix not positive definite in " + block_label(block));
  }
  const Vector mean = llt.solve(linear);
  Vector zdraw(linear.size());
  for (Eigen::Index i = 0; i < zdraw.size(); ++i) zdraw[i] = rng.normal();
  Vector x = mean + llt.matrixU().solve(zdraw);

  // Condition on A x = 0 by kriging: x <- x - P^{-1} A^T (A P^{-1} A^T)^{-1} A x.
  const Matrix pinv_at = llt.solve(constraints.transpose());
  const Matrix gram = constraints * pinv_at;
  Eigen::LLT<Matrix> gram_llt(gram);
  if (gram_llt.info() != Eigen::Success) {
    throw NumericalError(errc::singular_conditional,
                         "constraint system singular in " + block_label(block));
  }
  x -= pinv_at * gram_llt.solve(constraints * x);
  return x;
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
    throw UsageError(errc::invalid_hyperparameter, "inverse-gamma parameters must be positive and finite");
  }
  double g = 0.0;
  do {
    g = rng.gamma(shape);
  } while (g == 0.0);
  return scale / g;
}

int sample_bernoulli(double prob, RngStream& rng) {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw NumericalError(errc::invalid_probability, "Bernoulli probability outside [0, 1]");
  }
  return rng.uniform01() < prob ? 1 : 0;
}

double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw UsageError(errc::invalid_hyperparameter, "beta parameters must be positive and finite");
  }
  double x, y;
  do {
    x = rng.gamma(a);
    y = rng.gamma(b);
  } while (x + y == 0.0);
  return x / (x + y);
}

}  // namespace sae
