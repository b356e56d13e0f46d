#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sae/area_graph.hpp"
#include "sae/dataset.hpp"
#include "sae/draws.hpp"
#include "sae/harness.hpp"
#include "sae/types.hpp"

namespace sae {

// Parsed area-level survey table.  The design matrix always carries a
// leading intercept column of ones; `covariate_names` lists the remaining
// columns in file order.
struct SurveyTable {
  std::vector<std::string> area_ids;
  Vector y;
  Vector d;
  Matrix x;
  std::vector<std::string> covariate_names;

  int n_areas() const { return static_cast<int>(y.size()); }
};

// Reads a header-first CSV with one row per area.  Quoted fields with ""
// escapes are honoured; cells must parse as finite numbers.  Throws
// DataError: missing_column, non_numeric_cell (with row and column),
// duplicate_area_id, non_positive_variance, file_io for structural damage.
SurveyTable load_survey_csv(const std::string& path, const std::string& y_col,
                            const std::string& d_col,
                            const std::vector<std::string>& covariate_cols,
                            const std::string& id_col);

// Carriers into the two consumers of a survey table.
SurveyDataset to_dataset(const SurveyTable& table);
TruthSet to_truth(const SurveyTable& table);

// Edge-list file: one "id,id" pair per line; blank lines and lines starting
// with # are ignored.  Parse and graph errors report the line number.
AreaGraph load_adjacency(const std::string& path,
                         const std::vector<std::string>& area_ids);

enum class ContiguityRule { queen, rook };

// Derives an adjacency edge list from a GeoJSON FeatureCollection of
// polygons.  Queen: features sharing at least one boundary point (after
// rounding coordinates to 1e-7) are adjacent; rook: a shared boundary
// segment is required.  The result is lexicographically sorted and
// symmetric, independent of feature order.
std::vector<std::pair<std::string, std::string>> contiguity_from_geojson(
    const std::string& path, const std::string& id_property,
    ContiguityRule rule = ContiguityRule::queen);

// Writes `content` to `path` through a temporary file plus atomic rename;
// no partial output is left behind on failure.
void write_atomic(const std::string& path, const std::string& content);

// Hex SHA-256 digest of a file's bytes, recorded in run manifests.
std::string sha256_file(const std::string& path);

// Fit summary as CSV: id, mean, sd, lower, upper, selection_prob (empty for
// models without selection), original response scale, 17 significant digits.
void export_fit(const FitSummary& summary, const std::string& path);

// Reads a CSV written by export_fit back into per-area rows.
struct FitRow {
  std::string area_id;
  double mean = 0.0, sd = 0.0, lower = 0.0, upper = 0.0;
  std::optional<double> selection_prob;
};
std::vector<FitRow> load_fit_csv(const std::string& path);

// Copies the input GeoJSON geometry and attaches mean/sd/lower/upper (and
// selection_prob when present) as feature properties keyed by id_property.
// Unmatched ids on either side raise id_mismatch listing them.
void export_geojson(const FitSummary& summary, const std::string& geojson_in,
                    const std::string& id_property, const std::string& path_out);

// Two-column id,effect CSV of posterior random-effect means, for the
// spatial diagnostics workflow.
void export_effects(const std::vector<std::string>& area_ids, const Vector& effects,
                    const std::string& path);
std::pair<std::vector<std::string>, Vector> load_effects(const std::string& path);

// Study outputs: one row per estimator with the four averaged metrics
// (coverage and interval score empty for direct), and the per-replication
// mse table (estimator, g, mse).
void export_report(const SimulationReport& report, const std::string& path);
void export_replications(const SimulationReport& report, const std::string& path);

}  // namespace sae
