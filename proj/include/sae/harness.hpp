#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sae/dataset.hpp"
#include "sae/rng.hpp"
#include "sae/types.hpp"

namespace sae {

// ---------------------------------------------------------------------------
// Comparison metrics.  `estimates` and the interval matrices are G x n:
// one row per replication, one column per area; z holds the true means.
// All four reject mismatched shapes; the interval metrics reject any
// interval with lower > upper.
// ---------------------------------------------------------------------------

// (1/G) sum_g (1/n) sum_i (zhat_gi - z_i)^2
double avg_mse(const Matrix& estimates, const Vector& z);

// Share of (g, i) with lower < z_i < upper; equality counts as a miss.
double coverage_rate(const Matrix& lower, const Matrix& upper, const Vector& z);

// Mean over (g, i) of (u - l) + (2/alpha)(l - z) 1{z < l} + (2/alpha)(z - u) 1{z > u}.
double interval_score(const Matrix& lower, const Matrix& upper, const Vector& z,
                      double alpha);

// (1/n) sum_i | z_i - (1/G) sum_g zhat_gi |: areas are averaged over
// replications before the absolute value is taken.
double abs_bias(const Matrix& estimates, const Vector& z);

// ---------------------------------------------------------------------------
// Replicated simulation study: treat a vector of observed positive means as
// the truth, perturb on the log scale, refit, score on the raw scale.
// ---------------------------------------------------------------------------

struct TruthSet {
  std::vector<std::string> area_ids;
  Vector z;  // treated-as-true small-area means, strictly positive
  Vector d;  // reported sampling variances of z, strictly positive
  Matrix x;  // covariates, first column typically the intercept
  std::optional<AreaGraph> graph;

  int n_areas() const { return static_cast<int>(z.size()); }
  void validate() const;
};

enum class Estimator { direct, fh, dm, bym, ssd };

const char* estimator_name(Estimator e) noexcept;
Estimator parse_estimator(const std::string& name);

// Chain protocol used by the study unless overridden: 2000 retained draws,
// burn-in 9000 for the unstructured and mixture baselines, 2000 for the
// spatial models.  The direct estimator has no chain.
McmcConfig protocol_mcmc(Estimator e);

struct StudyConfig {
  int replications = 100;  // G
  double alpha = 0.10;
  std::vector<Estimator> estimators;
  PriorConfig priors;
  std::map<Estimator, McmcConfig> mcmc;  // per-estimator overrides
  std::uint64_t master_seed = 0;

  McmcConfig mcmc_for(Estimator e) const;
  void validate() const;
};

struct EstimatorReport {
  Estimator estimator = Estimator::direct;
  double avg_mse = 0.0;
  double avg_abs_bias = 0.0;
  std::optional<double> avg_coverage;        // absent for direct
  std::optional<double> avg_interval_score;  // absent for direct
  std::vector<double> replication_mse;       // length G; avg_mse is its mean
};

struct SimulationReport {
  StudyConfig config;
  std::vector<EstimatorReport> estimators;  // in config order
  double wall_seconds = 0.0;                // provenance, not reproducible
};

// One synthetic dataset: y_i ~ N(log z_i, d_i / z_i^2) independently, with
// the sampling variances d_i / z_i^2 carried over as known.  Draws come from
// rng.child(g), so replications are reproducible in any call order.
SurveyDataset make_synthetic(const TruthSet& truth, int g, const RngStream& rng);

// Full protocol: for each replication generate data, fit every requested
// estimator, back-transform draws with exp, score posterior means and
// central (1 - alpha) intervals against z.  Deterministic given the master
// seed.  A failed fit aborts the study with the replication index attached.
SimulationReport run_study(const TruthSet& truth, const StudyConfig& config);

}  // namespace sae
