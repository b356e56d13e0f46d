#include "sae/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "sae/draws.hpp"
#include "sae/errors.hpp"
#include "sae/models.hpp"

namespace sae {

namespace {

void require_shape(const Matrix& m, const Vector& z, const char* what) {
  if (m.rows() < 1 || m.cols() != z.size()) {
    throw UsageError(errc::dimension_mismatch,
                     std::string(what) + ": need a G x n matrix with n = " +
                         std::to_string(z.size()) + ", got " + std::to_string(m.rows()) +
                         " x " + std::to_string(m.cols()));
  }
}

void require_intervals(const Matrix& lower, const Matrix& upper, const Vector& z) {
  require_shape(lower, z, "interval lower bounds");
  require_shape(upper, z, "interval upper bounds");
  if (lower.rows() != upper.rows()) {
    throw UsageError(errc::dimension_mismatch, "interval bound matrices disagree in G");
  }
  for (Eigen::Index g = 0; g < lower.rows(); ++g) {
    for (Eigen::Index i = 0; i < lower.cols(); ++i) {
      if (!(lower(g, i) <= upper(g, i))) {
        throw UsageError(errc::inverted_interval,
                         "interval for replication " + std::to_string(g) + ", area " +
                             std::to_string(i) + " has lower > upper");
      }
    }
  }
}

double row_mean_sq_error(const Matrix& estimates, const Vector& z, Eigen::Index g) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double e = estimates(g, i) - z[i];
    acc += e * e;
  }
  return acc / static_cast<double>(z.size());
}

}  // namespace

double avg_mse(const Matrix& estimates, const Vector& z) {
  require_shape(estimates, z, "estimates");
  double acc = 0.0;
  for (Eigen::Index g = 0; g < estimates.rows(); ++g) acc += row_mean_sq_error(estimates, z, g);
  return acc / static_cast<double>(estimates.rows());
}

double coverage_rate(const Matrix& lower, const Matrix& upper, const Vector& z) {
  require_intervals(lower, upper, z);
  double hits = 0.0;
  for (Eigen::Index g = 0; g < lower.rows(); ++g) {
    for (Eigen::Index i = 0; i < lower.cols(); ++i) {
      if (lower(g, i) < z[i] && z[i] < upper(g, i)) hits += 1.0;
    }
  }
  return hits / static_cast<double>(lower.rows() * lower.cols());
}

double interval_score(const Matrix& lower, const Matrix& upper, const Vector& z,
                      double alpha) {
  require_intervals(lower, upper, z);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError(errc::invalid_argument, "interval score needs alpha in (0, 1)");
  }
  const double penalty = 2.0 / alpha;
  double acc = 0.0;
  for (Eigen::Index g = 0; g < lower.rows(); ++g) {
    for (Eigen::Index i = 0; i < lower.cols(); ++i) {
      const double l = lower(g, i), u = upper(g, i);
      double s = u - l;
      if (z[i] < l) s += penalty * (l - z[i]);
      if (z[i] > u) s += penalty * (z[i] - u);
      acc += s;
    }
  }
  return acc / static_cast<double>(lower.rows() * lower.cols());
}

double abs_bias(const Matrix& estimates, const Vector& z) {
  require_shape(estimates, z, "estimates");
  const double g_count = static_cast<double>(estimates.rows());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double area_mean = 0.0;
    for (Eigen::Index g = 0; g < estimates.rows(); ++g) area_mean += estimates(g, i);
    acc += std::abs(z[i] - area_mean / g_count);
  }
  return acc / static_cast<double>(z.size());
}

void TruthSet::validate() const {
  const int n = n_areas();
  if (n < 1) throw DataError(errc::non_positive_truth, "truth set is empty");
  if (d.size() != n) {
    throw DataError(errc::dimension_mismatch, "truth z and d lengths differ");
  }
  if (static_cast<int>(area_ids.size()) != n) {
    throw DataError(errc::dimension_mismatch, "truth needs one area id per area");
  }
  if (x.rows() != n || x.cols() < 1) {
    throw DataError(errc::dimension_mismatch, "truth covariates must be n x j with j >= 1");
  }
  for (int i = 0; i < n; ++i) {
    if (!(z[i] > 0.0)) {
      throw DataError(errc::non_positive_truth,
                      "true mean for area " + area_ids[i] + " is not positive");
    }
    if (!(d[i] > 0.0)) {
      throw DataError(errc::non_positive_truth,
                      "sampling variance for area " + area_ids[i] + " is not positive");
    }
  }
  if (graph && graph->n != n) {
    throw DataError(errc::dimension_mismatch, "graph size disagrees with truth set");
  }
}

const char* estimator_name(Estimator e) noexcept {
  switch (e) {
    case Estimator::direct: return "direct";
    case Estimator::fh: return "fh";
    case Estimator::dm: return "dm";
    case Estimator::bym: return "bym";
    case Estimator::ssd: return "ssd";
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : {Estimator::direct, Estimator::fh, Estimator::dm, Estimator::bym,
                      Estimator::ssd}) {
    if (name == estimator_name(e)) return e;
  }
  throw UsageError(errc::invalid_argument, "unknown estimator '" + name + "'");
}

McmcConfig protocol_mcmc(Estimator e) {
  McmcConfig mc;
  mc.iterations = 2000;
  switch (e) {
    case Estimator::fh:
    case Estimator::dm:
      mc.burn_in = 9000;
      break;
    case Estimator::bym:
    case Estimator::ssd:
      mc.burn_in = 2000;
      break;
    case Estimator::direct:
      throw UsageError(errc::invalid_argument, "the direct estimator has no chain");
  }
  return mc;
}

McmcConfig StudyConfig::mcmc_for(Estimator e) const {
  const auto it = mcmc.find(e);
  return it != mcmc.end() ? it->second : protocol_mcmc(e);
}

void StudyConfig::validate() const {
  if (replications < 1) {
    throw UsageError(errc::invalid_argument, "a study needs at least one replication");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError(errc::invalid_argument, "study alpha must lie in (0, 1)");
  }
  if (estimators.empty()) {
    throw UsageError(errc::invalid_argument, "a study needs at least one estimator");
  }
  std::set<Estimator> seen;
  for (Estimator e : estimators) {
    if (!seen.insert(e).second) {
      throw UsageError(errc::invalid_argument,
                       std::string("estimator '") + estimator_name(e) + "' listed twice");
    }
    if (e != Estimator::direct) mcmc_for(e).validate();
  }
  priors.validate();
}

SurveyDataset make_synthetic(const TruthSet& truth, int g, const RngStream& rng) {
  truth.validate();
  if (g < 0) throw UsageError(errc::invalid_argument, "replication index must be >= 0");
  const int n = truth.n_areas();
  SurveyDataset ds;
  ds.area_ids = truth.area_ids;
  ds.x = truth.x;
  ds.graph = truth.graph;
  ds.y.resize(n);
  ds.d.resize(n);
  RngStream stream = rng.child(static_cast<std::uint64_t>(g));
  for (int i = 0; i < n; ++i) {
    const double log_scale_var = truth.d[i] / (truth.z[i] * truth.z[i]);
    ds.d[i] = log_scale_var;
    ds.y[i] = std::log(truth.z[i]) + std::sqrt(log_scale_var) * stream.normal();
  }
  return ds;
}

namespace {

PosteriorDraws fit_estimator(Estimator e, const SurveyDataset& ds, const PriorConfig& priors,
                             const McmcConfig& mcmc) {
  switch (e) {
    case Estimator::fh: return fit_fh(ds, priors, mcmc);
    case Estimator::dm: return fit_dm(ds, priors, mcmc);
    case Estimator::bym: return fit_bym(ds, priors, mcmc);
    case Estimator::ssd: return fit_ssd(ds, priors, mcmc);
    case Estimator::direct: break;
  }
  throw UsageError(errc::invalid_argument, "the direct estimator is not fitted");
}

}  // namespace

SimulationReport run_study(const TruthSet& truth, const StudyConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  truth.validate();
  config.validate();
  const bool needs_graph =
      std::any_of(config.estimators.begin(), config.estimators.end(),
                  [](Estimator e) { return e == Estimator::bym || e == Estimator::ssd; });
  if (needs_graph && !truth.graph) {
    throw DataError(errc::missing_graph, "spatial estimators need a contiguity graph");
  }

  const int n = truth.n_areas();
  const int big_g = config.replications;
  const int n_est = static_cast<int>(config.estimators.size());

  std::vector<Matrix> zhat(n_est, Matrix::Zero(big_g, n));
  std::vector<Matrix> lower(n_est, Matrix::Zero(big_g, n));
  std::vector<Matrix> upper(n_est, Matrix::Zero(big_g, n));

  const RngStream data_root(config.master_seed, 0xDA7AULL);
  std::vector<double> column(0);

  for (int g = 0; g < big_g; ++g) {
    const SurveyDataset ds = make_synthetic(truth, g, data_root);
    for (int k = 0; k < n_est; ++k) {
      const Estimator e = config.estimators[k];
      if (e == Estimator::direct) {
        for (int i = 0; i < n; ++i) zhat[k](g, i) = std::exp(ds.y[i]);
        continue;
      }
      McmcConfig mc = config.mcmc_for(e);
      mc.seed = derive_seed(derive_seed(config.master_seed, 0xF17ULL + static_cast<int>(e)),
                            static_cast<std::uint64_t>(g));
      PosteriorDraws draws;
      try {
        draws = fit_estimator(e, ds, config.priors, mc);
      } catch (const Error& err) {
        const std::string context = "replication " + std::to_string(g) + ", estimator " +
                                    estimator_name(e) + ": " + err.what();
        if (dynamic_cast<const NumericalError*>(&err)) throw NumericalError(err.code(), context);
        if (dynamic_cast<const UsageError*>(&err)) throw UsageError(err.code(), context);
        throw DataError(err.code(), context);
      }
      const Matrix theta = draws.theta_original();
      const int draw_count = static_cast<int>(theta.rows());
      column.resize(draw_count);
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int s = 0; s < draw_count; ++s) {
          column[s] = std::exp(theta(s, i));
          acc += column[s];
        }
        zhat[k](g, i) = acc / draw_count;
        std::sort(column.begin(), column.end());
        lower[k](g, i) = quantile_sorted(column, config.alpha / 2.0);
        upper[k](g, i) = quantile_sorted(column, 1.0 - config.alpha / 2.0);
      }
    }
  }

  SimulationReport report;
  report.config = config;
  for (int k = 0; k < n_est; ++k) {
    EstimatorReport er;
    er.estimator = config.estimators[k];
    er.replication_mse.resize(big_g);
    double acc = 0.0;
    for (int g = 0; g < big_g; ++g) {
      er.replication_mse[g] = row_mean_sq_error(zhat[k], truth.z, g);
      acc += er.replication_mse[g];
    }
    er.avg_mse = acc / static_cast<double>(big_g);
    er.avg_abs_bias = abs_bias(zhat[k], truth.z);
    if (er.estimator != Estimator::direct) {
      er.avg_coverage = coverage_rate(lower[k], upper[k], truth.z);
      er.avg_interval_score = interval_score(lower[k], upper[k], truth.z, config.alpha);
    }
    report.estimators.push_back(std::move(er));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace sae
