// Command-line driver: fit one model, run a replicated simulation study,
// test fitted random effects for spatial structure, or derive/validate a
// contiguity graph.  Every run that writes output also writes a JSON
// manifest (inputs with digests, resolved config, seed, version) so results
// can be reproduced bit for bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "sae/data_io.hpp"
#include "sae/errors.hpp"
#include "sae/harness.hpp"
#include "sae/models.hpp"
#include "sae/rng.hpp"
#include "sae/spatial_stats.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// SAE_THREADS caps the linear-algebra thread pool; samplers themselves are
// sequential so results do not depend on it.
int resolve_threads() {
  const char* env = std::getenv("SAE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || value < 1 || value > 4096)
    throw sae::UsageError(sae::errc::invalid_argument,
                          "SAE_THREADS must be a positive integer, got '" +
                              std::string(env) + "'");
  Eigen::setNbThreads(static_cast<int>(value));
  return static_cast<int>(value);
}

json manifest_skeleton(const std::string& subcommand, std::uint64_t seed, int threads) {
  json m;
  m["subcommand"] = subcommand;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["threads"] = threads;
  m["inputs"] = json::object();
  m["outputs"] = json::array();
  m["config"] = json::object();
  return m;
}

void add_input(json& m, const std::string& role, const std::string& path) {
  m["inputs"][role] = {{"path", path}, {"sha256", sae::sha256_file(path)}};
}

void write_manifest(json& m, double wall_seconds, const std::string& path) {
  m["wall_seconds"] = wall_seconds;
  sae::write_atomic(path, m.dump(2) + "\n");
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
  std::string model;
  std::string survey;
  std::string adjacency;
  std::string out_dir;
  std::string geojson;
  std::string geojson_id;
  std::string id_col = "id";
  std::string y_col = "y";
  std::string d_col = "d";
  std::vector<std::string> covariates;
  int iters = 2000;
  int burnin = 2000;
  int chains = 1;
  std::uint64_t seed = 0;
  double alpha = 0.10;
};

int cmd_fit(const FitArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const int threads = resolve_threads();

  const bool spatial = a.model == "bym" || a.model == "ssd";
  if (spatial && a.adjacency.empty())
    throw sae::UsageError(sae::errc::missing_graph,
                          "--adjacency is required for model '" + a.model + "'");
  if (!(a.alpha > 0.0 && a.alpha <= 1.0))
    throw sae::UsageError(sae::errc::invalid_argument, "--alpha must be in (0, 1]");

  const sae::SurveyTable table =
      sae::load_survey_csv(a.survey, a.y_col, a.d_col, a.covariates, a.id_col);
  sae::SurveyDataset data = sae::to_dataset(table);
  if (!a.adjacency.empty()) data.graph = sae::load_adjacency(a.adjacency, table.area_ids);

  const sae::PriorConfig priors;
  sae::McmcConfig mcmc;
  mcmc.iterations = a.iters;
  mcmc.burn_in = a.burnin;
  mcmc.chains = a.chains;
  mcmc.seed = a.seed;
  mcmc.validate();

  sae::PosteriorDraws draws;
  if (a.model == "fh")
    draws = sae::fit_fh(data, priors, mcmc);
  else if (a.model == "dm")
    draws = sae::fit_dm(data, priors, mcmc);
  else if (a.model == "bym")
    draws = sae::fit_bym(data, priors, mcmc);
  else
    draws = sae::fit_ssd(data, priors, mcmc);

  const sae::FitSummary summary = sae::summarize(draws, a.alpha);

  std::filesystem::create_directories(a.out_dir);
  sae::export_fit(summary, join_path(a.out_dir, "fit.csv"));
  const sae::Vector effect_means = draws.u.colwise().mean().transpose();
  sae::export_effects(draws.area_ids, effect_means, join_path(a.out_dir, "effects.csv"));

  json m = manifest_skeleton("fit", a.seed, threads);
  add_input(m, "survey", a.survey);
  if (!a.adjacency.empty()) add_input(m, "adjacency", a.adjacency);
  m["outputs"].push_back("fit.csv");
  m["outputs"].push_back("effects.csv");
  if (!a.geojson.empty()) {
    const std::string id_prop = a.geojson_id.empty() ? a.id_col : a.geojson_id;
    sae::export_geojson(summary, a.geojson, id_prop, join_path(a.out_dir, "fit.geojson"));
    add_input(m, "geojson", a.geojson);
    m["outputs"].push_back("fit.geojson");
  }
  m["config"] = {{"model", a.model},       {"id_col", a.id_col},
                 {"y_col", a.y_col},       {"d_col", a.d_col},
                 {"covariates", a.covariates}, {"iterations", a.iters},
                 {"burn_in", a.burnin},    {"chains", a.chains},
                 {"alpha", a.alpha},       {"out", a.out_dir}};

  std::printf("model %s: %d areas, %d retained draws\n", a.model.c_str(),
              draws.n_areas(), draws.n_draws());
  for (int j = 0; j < summary.beta_mean.size(); ++j)
    std::printf("posterior mean beta[%d] = %.6g\n", j, summary.beta_mean[j]);
  for (const auto& [name, value] : summary.scalar_means)
    std::printf("posterior mean %s = %.6g\n", name.c_str(), value);
  if (summary.has_selection) {
    double sum = 0.0;
    const sae::AreaSummary* lo = &summary.areas.front();
    const sae::AreaSummary* hi = &summary.areas.front();
    for (const auto& area : summary.areas) {
      sum += area.selection_rate;
      if (area.selection_rate < lo->selection_rate) lo = &area;
      if (area.selection_rate > hi->selection_rate) hi = &area;
    }
    std::printf("selection rate: mean %.3f, min %.3f (%s), max %.3f (%s)\n",
                sum / static_cast<double>(summary.areas.size()), lo->selection_rate,
                lo->area_id.c_str(), hi->selection_rate, hi->area_id.c_str());
  }

  write_manifest(m, seconds_since(start), join_path(a.out_dir, "manifest_fit.json"));
  std::printf("wrote %s\n", join_path(a.out_dir, "fit.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimArgs {
  std::string survey;
  std::string adjacency;
  std::string out_dir;
  std::string id_col = "id";
  std::string z_col = "z";
  std::string d_col = "d";
  std::vector<std::string> covariates;
  std::vector<std::string> estimators = {"direct", "fh", "dm", "bym", "ssd"};
  int reps = 100;
  double alpha = 0.10;
  std::uint64_t seed = 0;
  // -1 keeps the per-estimator protocol value.
  int iters = -1, burnin = -1;
  int fh_iters = -1, fh_burnin = -1;
  int dm_iters = -1, dm_burnin = -1;
  int bym_iters = -1, bym_burnin = -1;
  int ssd_iters = -1, ssd_burnin = -1;
};

int cmd_simulate(const SimArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const int threads = resolve_threads();

  sae::StudyConfig config;
  config.replications = a.reps;
  config.alpha = a.alpha;
  config.master_seed = a.seed;
  bool needs_graph = false;
  for (const std::string& name : a.estimators) {
    const sae::Estimator e = sae::parse_estimator(name);
    config.estimators.push_back(e);
    if (e == sae::Estimator::bym || e == sae::Estimator::ssd) needs_graph = true;
    if (e == sae::Estimator::direct) continue;
    sae::McmcConfig mc = sae::protocol_mcmc(e);
    if (a.iters >= 0) mc.iterations = a.iters;
    if (a.burnin >= 0) mc.burn_in = a.burnin;
    const auto pick = [&](int it, int bi) {
      if (it >= 0) mc.iterations = it;
      if (bi >= 0) mc.burn_in = bi;
    };
    if (e == sae::Estimator::fh) pick(a.fh_iters, a.fh_burnin);
    if (e == sae::Estimator::dm) pick(a.dm_iters, a.dm_burnin);
    if (e == sae::Estimator::bym) pick(a.bym_iters, a.bym_burnin);
    if (e == sae::Estimator::ssd) pick(a.ssd_iters, a.ssd_burnin);
    config.mcmc[e] = mc;
  }
  if (needs_graph && a.adjacency.empty())
    throw sae::UsageError(sae::errc::missing_graph,
                          "--adjacency is required when bym or ssd is requested");
  config.validate();

  const sae::SurveyTable table =
      sae::load_survey_csv(a.survey, a.z_col, a.d_col, a.covariates, a.id_col);
  sae::TruthSet truth = sae::to_truth(table);
  if (!a.adjacency.empty()) truth.graph = sae::load_adjacency(a.adjacency, table.area_ids);

  const sae::SimulationReport report = sae::run_study(truth, config);

  std::filesystem::create_directories(a.out_dir);
  sae::export_report(report, join_path(a.out_dir, "report.csv"));
  sae::export_replications(report, join_path(a.out_dir, "replications.csv"));

  json m = manifest_skeleton("simulate", a.seed, threads);
  add_input(m, "survey", a.survey);
  if (!a.adjacency.empty()) add_input(m, "adjacency", a.adjacency);
  m["outputs"].push_back("report.csv");
  m["outputs"].push_back("replications.csv");
  json mc_json = json::object();
  for (const sae::Estimator e : config.estimators) {
    if (e == sae::Estimator::direct) continue;
    const sae::McmcConfig mc = config.mcmc_for(e);
    mc_json[sae::estimator_name(e)] = {{"iterations", mc.iterations},
                                       {"burn_in", mc.burn_in}};
  }
  m["config"] = {{"estimators", a.estimators}, {"replications", a.reps},
                 {"alpha", a.alpha},           {"id_col", a.id_col},
                 {"z_col", a.z_col},           {"d_col", a.d_col},
                 {"covariates", a.covariates}, {"mcmc", mc_json},
                 {"out", a.out_dir}};

  std::printf("%d areas, %d replications\n", truth.n_areas(), a.reps);
  std::printf("%-9s %13s %9s %13s %13s\n", "estimator", "avg_mse", "coverage",
              "int_score", "abs_bias");
  for (const sae::EstimatorReport& er : report.estimators) {
    char cov[16] = "-";
    char score[16] = "-";
    if (er.avg_coverage) std::snprintf(cov, sizeof cov, "%.4f", *er.avg_coverage);
    if (er.avg_interval_score)
      std::snprintf(score, sizeof score, "%.5e", *er.avg_interval_score);
    std::printf("%-9s %13.5e %9s %13s %13.5e\n", sae::estimator_name(er.estimator),
                er.avg_mse, cov, score, er.avg_abs_bias);
  }

  write_manifest(m, seconds_since(start), join_path(a.out_dir, "manifest_simulate.json"));
  std::printf("wrote %s\n", join_path(a.out_dir, "report.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

struct DiagArgs {
  std::string fit_dir;
  std::string adjacency;
  int mc_iters = 1000;
  std::uint64_t seed = 0;
};

int cmd_diagnose(const DiagArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const int threads = resolve_threads();

  if (a.mc_iters < 1)
    throw sae::UsageError(sae::errc::invalid_argument,
                          "--mc-iters must be a positive integer");

  const std::string effects_path = join_path(a.fit_dir, "effects.csv");
  const auto [ids, effects] = sae::load_effects(effects_path);
  const sae::AreaGraph graph = sae::load_adjacency(a.adjacency, ids);

  const double c = sae::gearys_c(effects, graph);
  sae::RngStream rng(a.seed);
  const double p = sae::gearys_c_mc_test(effects, graph, a.mc_iters, rng);

  std::string csv = "statistic,value\n";
  csv += "gearys_c," + fmt17(c) + "\n";
  csv += "p_value," + fmt17(p) + "\n";
  csv += "mc_iters," + std::to_string(a.mc_iters) + "\n";
  sae::write_atomic(join_path(a.fit_dir, "diagnostics.csv"), csv);

  json m = manifest_skeleton("diagnose", a.seed, threads);
  add_input(m, "effects", effects_path);
  add_input(m, "adjacency", a.adjacency);
  m["outputs"].push_back("diagnostics.csv");
  m["config"] = {{"fit", a.fit_dir}, {"mc_iters", a.mc_iters}};

  std::printf("gearys_c = %.6g\n", c);
  std::printf("p_value = %.6g (%d permutations)\n", p, a.mc_iters);

  write_manifest(m, seconds_since(start), join_path(a.fit_dir, "manifest_diagnose.json"));
  return 0;
}

// ---------------------------------------------------------------------------
// graph
// ---------------------------------------------------------------------------

struct GraphArgs {
  std::string geojson;
  std::string id_property = "id";
  std::string rule = "queen";
  std::string out;
  std::string adjacency;
  std::string survey;
  std::string id_col = "id";
  std::string y_col = "y";
  std::string d_col = "d";
};

int cmd_graph(const GraphArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const int threads = resolve_threads();

  const bool derive = !a.geojson.empty();
  const bool check = !a.adjacency.empty();
  if (derive == check)
    throw sae::UsageError(sae::errc::invalid_argument,
                          "pass exactly one of --geojson (derive) or --adjacency (validate)");

  if (derive) {
    if (a.out.empty())
      throw sae::UsageError(sae::errc::invalid_argument,
                            "--out is required when deriving from --geojson");
    const sae::ContiguityRule rule =
        a.rule == "rook" ? sae::ContiguityRule::rook : sae::ContiguityRule::queen;
    const auto edges = sae::contiguity_from_geojson(a.geojson, a.id_property, rule);
    std::string body = "# contiguity (" + a.rule + ") derived from " +
                       std::filesystem::path(a.geojson).filename().string() + "\n";
    for (const auto& [u, v] : edges) {
      if (u.find(',') != std::string::npos || v.find(',') != std::string::npos)
        throw sae::DataError(sae::errc::malformed_edge_list,
                             "area id containing a comma cannot be written to an edge list");
      body += u + "," + v + "\n";
    }
    sae::write_atomic(a.out, body);

    json m = manifest_skeleton("graph", 0, threads);
    add_input(m, "geojson", a.geojson);
    m["outputs"].push_back(std::filesystem::path(a.out).filename().string());
    m["config"] = {{"id_property", a.id_property}, {"rule", a.rule}, {"out", a.out}};
    const std::string dir = std::filesystem::path(a.out).parent_path().string();
    write_manifest(m, seconds_since(start),
                   join_path(dir.empty() ? "." : dir, "manifest_graph.json"));

    std::printf("%zu contiguity edges -> %s\n", edges.size(), a.out.c_str());
    return 0;
  }

  if (a.survey.empty())
    throw sae::UsageError(sae::errc::invalid_argument,
                          "--survey is required to validate an adjacency file");
  const sae::SurveyTable table =
      sae::load_survey_csv(a.survey, a.y_col, a.d_col, {}, a.id_col);
  const sae::AreaGraph graph = sae::load_adjacency(a.adjacency, table.area_ids);
  int isolated = 0;
  for (const int deg : graph.degree)
    if (deg == 0) ++isolated;
  std::printf("graph ok: %d areas, %zu edges, %d components, %d isolated\n", graph.n,
              graph.edges.size(), graph.n_components, isolated);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-area estimation with spatially selected and dependent effects"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("sae ") + kVersion);
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");

  FitArgs fa;
  SimArgs sa;
  DiagArgs da;
  GraphArgs ga;

  CLI::App* fit = app.add_subcommand("fit", "Fit one model and export area summaries");
  fit->add_option("--model", fa.model, "One of fh, dm, bym, ssd")
      ->required()
      ->check(CLI::IsMember({"fh", "dm", "bym", "ssd"}));
  fit->add_option("--survey", fa.survey, "Area-level survey CSV")->required();
  fit->add_option("--adjacency", fa.adjacency, "Edge-list file (required for bym and ssd)");
  fit->add_option("--covariates", fa.covariates, "Covariate columns, comma separated")
      ->delimiter(',');
  fit->add_option("--id-col", fa.id_col, "Area id column")->capture_default_str();
  fit->add_option("--y-col", fa.y_col, "Direct-estimate column")->capture_default_str();
  fit->add_option("--d-col", fa.d_col, "Sampling-variance column")->capture_default_str();
  fit->add_option("--iters", fa.iters, "Retained draws")->capture_default_str();
  fit->add_option("--burnin", fa.burnin, "Burn-in sweeps")->capture_default_str();
  fit->add_option("--chains", fa.chains, "Independent chains, draws pooled")
      ->capture_default_str();
  fit->add_option("--seed", fa.seed, "Chain seed")->capture_default_str();
  fit->add_option("--alpha", fa.alpha, "Credible-interval tail mass")->capture_default_str();
  fit->add_option("--out", fa.out_dir, "Output directory")->required();
  fit->add_option("--geojson", fa.geojson, "GeoJSON to re-emit with posterior properties");
  fit->add_option("--geojson-id", fa.geojson_id,
                  "Feature property holding the area id (default: --id-col)");

  CLI::App* sim = app.add_subcommand("simulate", "Replicated estimator comparison study");
  sim->add_option("--survey", sa.survey, "CSV of treated-as-true means and variances")
      ->required();
  sim->add_option("--adjacency", sa.adjacency, "Edge-list file (required for bym and ssd)");
  sim->add_option("--covariates", sa.covariates, "Covariate columns, comma separated")
      ->delimiter(',');
  sim->add_option("--id-col", sa.id_col, "Area id column")->capture_default_str();
  sim->add_option("--z-col", sa.z_col, "True-mean column")->capture_default_str();
  sim->add_option("--d-col", sa.d_col, "Sampling-variance column")->capture_default_str();
  sim->add_option("--estimators", sa.estimators, "Estimators to score, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sim->add_option("--reps", sa.reps, "Replications")->capture_default_str();
  sim->add_option("--alpha", sa.alpha, "Interval tail mass")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Master seed")->capture_default_str();
  sim->add_option("--iters", sa.iters, "Retained draws for every chain-based estimator");
  sim->add_option("--burnin", sa.burnin, "Burn-in for every chain-based estimator");
  sim->add_option("--fh-iters", sa.fh_iters, "Override retained draws for fh");
  sim->add_option("--fh-burnin", sa.fh_burnin, "Override burn-in for fh");
  sim->add_option("--dm-iters", sa.dm_iters, "Override retained draws for dm");
  sim->add_option("--dm-burnin", sa.dm_burnin, "Override burn-in for dm");
  sim->add_option("--bym-iters", sa.bym_iters, "Override retained draws for bym");
  sim->add_option("--bym-burnin", sa.bym_burnin, "Override burn-in for bym");
  sim->add_option("--ssd-iters", sa.ssd_iters, "Override retained draws for ssd");
  sim->add_option("--ssd-burnin", sa.ssd_burnin, "Override burn-in for ssd");
  sim->add_option("--out", sa.out_dir, "Output directory")->required();

  CLI::App* diag = app.add_subcommand("diagnose",
                                      "Geary's C permutation test on fitted effects");
  diag->add_option("--fit", da.fit_dir, "Directory written by a previous fit run")
      ->required();
  diag->add_option("--adjacency", da.adjacency, "Edge-list file")->required();
  diag->add_option("--mc-iters", da.mc_iters, "Permutations")->capture_default_str();
  diag->add_option("--seed", da.seed, "Permutation seed")->capture_default_str();

  CLI::App* graph = app.add_subcommand("graph", "Derive or validate a contiguity graph");
  graph->add_option("--geojson", ga.geojson, "Polygon FeatureCollection to derive from");
  graph->add_option("--id-property", ga.id_property, "Feature property holding the area id")
      ->capture_default_str();
  graph->add_option("--rule", ga.rule, "Contiguity rule")
      ->check(CLI::IsMember({"queen", "rook"}))
      ->capture_default_str();
  graph->add_option("--out", ga.out, "Edge-list file to write (derive mode)");
  graph->add_option("--adjacency", ga.adjacency, "Edge-list file to validate");
  graph->add_option("--survey", ga.survey, "Survey CSV naming the expected areas");
  graph->add_option("--id-col", ga.id_col, "Area id column")->capture_default_str();
  graph->add_option("--y-col", ga.y_col, "Direct-estimate column")->capture_default_str();
  graph->add_option("--d-col", ga.d_col, "Sampling-variance column")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(fa);
    if (sim->parsed()) return cmd_simulate(sa);
    if (diag->parsed()) return cmd_diagnose(da);
    if (graph->parsed()) return cmd_graph(ga);
  } catch (const sae::UsageError& e) {
    std::fprintf(stderr, "sae: %s\n", e.what());
    return 2;
  } catch (const sae::DataError& e) {
    std::fprintf(stderr, "sae: %s\n", e.what());
    return 3;
  } catch (const sae::NumericalError& e) {
    std::fprintf(stderr, "sae: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sae: unexpected failure: %s\n", e.what());
    return 1;
  }
  return 0;
}
