#pragma once

#include <string_view>

#include "sae/rng.hpp"
#include "sae/types.hpp"

namespace sae {

// One Polya-Gamma PG(1, c) draw.  Exact (rejection-based, no truncation of
// the random variable itself); E[X] = tanh(c/2)/(2c), with the limit 1/4 at
// c = 0.  Throws NumericalError if c is not finite.
double sample_pg1(double c, RngStream& rng);

// Draw x ~ N(P^{-1} b, P^{-1}) from a precision-form Gaussian.
// `block` names the conditional in error messages.  Throws NumericalError
// if the Cholesky factorization of P fails.
Vector sample_mvn_precision(const Matrix& precision, const Vector& linear,
                            RngStream& rng, std::string_view block = {});

// Draw from N(P^{-1} b, P^{-1}) conditioned on the exact linear constraint
// A x = 0, by correcting an unconstrained draw:
//   x* = x - P^{-1} A^T (A P^{-1} A^T)^{-1} A x.
// This is an exact draw from the constrained conditional, not a projection
// heuristic.  A must have full row rank.
Vector sample_mvn_precision_constrained(const Matrix& precision, const Vector& linear,
                                        const Matrix& constraints, RngStream& rng,
                                        std::string_view block = {});

// Inverse-gamma with shape a and scale (rate of the reciprocal) b:
// X = b / Gamma(a, 1).  Density proportional to x^{-a-1} exp(-b/x).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

// Bernoulli(p) as 0/1; p must lie in [0, 1].
int sample_bernoulli(double prob, RngStream& rng);

// Beta(a, b) via the two-gamma construction.
double sample_beta(double a, double b, RngStream& rng);

// Standard normal CDF (used by the PG proposal weights and exposed for tests).
double norm_cdf(double x) noexcept;

}  // namespace sae
