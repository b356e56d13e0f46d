#include "sae/data_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>
#include <openssl/evp.h>

#include "sae/errors.hpp"

namespace sae {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(errc::file_io, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw DataError(errc::file_io, "read failure on '" + path + "'");
  return std::move(buffer).str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// One CSV record: comma-separated, double quotes delimit fields that contain
// commas or quotes, embedded quotes are doubled.
std::vector<std::string> split_csv(const std::string& line, int line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trimmed(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw DataError(errc::file_io, "unterminated quote on line " + std::to_string(line_no));
  }
  fields.push_back(trimmed(field));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

double parse_cell(const std::string& cell, int line_no, const std::string& column) {
  const std::string t = trimmed(cell);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw DataError(errc::non_numeric_cell, "row " + std::to_string(line_no) + ", column '" +
                                                column + "': cannot read '" + cell +
                                                "' as a finite number");
  }
  return value;
}

std::string format_double(double value) {
  std::array<char, 40> buf;
  const int len = std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

int find_column(const std::vector<std::string>& header, const std::string& name,
                const std::string& path) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<int>(k);
  }
  throw DataError(errc::missing_column, "'" + path + "' has no column named '" + name + "'");
}

json parse_geojson(const std::string& path) {
  const json root = json::parse(read_file(path), nullptr, false);
  if (root.is_discarded()) {
    throw DataError(errc::malformed_geojson, "'" + path + "' is not valid JSON");
  }
  if (!root.is_object() || root.value("type", "") != "FeatureCollection" ||
      !root.contains("features") || !root["features"].is_array()) {
    throw DataError(errc::malformed_geojson, "'" + path + "' is not a FeatureCollection");
  }
  return root;
}

std::string feature_id(const json& feature, const std::string& id_property, std::size_t index) {
  if (!feature.is_object() || !feature.contains("properties") ||
      !feature["properties"].is_object()) {
    throw DataError(errc::malformed_geojson,
                    "feature " + std::to_string(index) + " has no properties object");
  }
  const json& props = feature["properties"];
  if (!props.contains(id_property)) {
    throw DataError(errc::missing_id_property, "feature " + std::to_string(index) +
                                                   " lacks property '" + id_property + "'");
  }
  const json& id = props[id_property];
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number() || id.is_boolean()) return id.dump();
  throw DataError(errc::missing_id_property,
                  "feature " + std::to_string(index) + ": property '" + id_property +
                      "' is not a string or number");
}

using QuantPoint = std::pair<std::int64_t, std::int64_t>;

QuantPoint quantize(const json& position, const std::string& id) {
  if (!position.is_array() || position.size() < 2 || !position[0].is_number() ||
      !position[1].is_number()) {
    throw DataError(errc::malformed_geojson, "feature '" + id + "' has a malformed coordinate");
  }
  const double x = position[0].get<double>();
  const double y = position[1].get<double>();
  return {static_cast<std::int64_t>(std::llround(x * 1e7)),
          static_cast<std::int64_t>(std::llround(y * 1e7))};
}

void collect_rings(const json& geometry, const std::string& id,
                   std::vector<std::vector<QuantPoint>>& rings) {
  if (!geometry.is_object() || !geometry.contains("type") ||
      !geometry.contains("coordinates")) {
    throw DataError(errc::malformed_geojson, "feature '" + id + "' has no usable geometry");
  }
  const std::string type = geometry.value("type", "");
  const json& coords = geometry["coordinates"];
  auto read_polygon = [&](const json& polygon) {
    if (!polygon.is_array()) {
      throw DataError(errc::malformed_geojson, "feature '" + id + "' has malformed rings");
    }
    for (const json& ring : polygon) {
      if (!ring.is_array()) {
        throw DataError(errc::malformed_geojson, "feature '" + id + "' has a malformed ring");
      }
      std::vector<QuantPoint> pts;
      pts.reserve(ring.size());
      for (const json& position : ring) pts.push_back(quantize(position, id));
      rings.push_back(std::move(pts));
    }
  };
  if (type == "Polygon") {
    read_polygon(coords);
  } else if (type == "MultiPolygon") {
    if (!coords.is_array()) {
      throw DataError(errc::malformed_geojson, "feature '" + id + "' has malformed coordinates");
    }
    for (const json& polygon : coords) read_polygon(polygon);
  } else {
    throw DataError(errc::malformed_geojson,
                    "feature '" + id + "' has geometry type '" + type +
                        "', need Polygon or MultiPolygon");
  }
}

}  // namespace

SurveyTable load_survey_csv(const std::string& path, const std::string& y_col,
                            const std::string& d_col,
                            const std::vector<std::string>& covariate_cols,
                            const std::string& id_col) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty()) throw DataError(errc::file_io, "'" + path + "' is empty");

  const std::vector<std::string> header = split_csv(lines[0], 1);
  const int idx_id = find_column(header, id_col, path);
  const int idx_y = find_column(header, y_col, path);
  const int idx_d = find_column(header, d_col, path);
  std::vector<int> idx_cov;
  for (const std::string& name : covariate_cols) {
    idx_cov.push_back(find_column(header, name, path));
  }

  std::vector<std::vector<std::string>> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (trimmed(lines[ln]).empty()) continue;
    std::vector<std::string> fields = split_csv(lines[ln], static_cast<int>(ln + 1));
    if (fields.size() != header.size()) {
      throw DataError(errc::file_io, "line " + std::to_string(ln + 1) + " has " +
                                         std::to_string(fields.size()) + " fields, header has " +
                                         std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw DataError(errc::file_io, "'" + path + "' has no data rows");

  const int n = static_cast<int>(rows.size());
  SurveyTable table;
  table.area_ids.reserve(rows.size());
  table.y.resize(n);
  table.d.resize(n);
  table.x = Matrix::Ones(n, 1 + static_cast<int>(idx_cov.size()));
  table.covariate_names = covariate_cols;

  std::set<std::string> seen;
  for (int r = 0; r < n; ++r) {
    const int line_no = r + 2;  // header is line 1, blank lines already dropped
    const std::string& id = rows[r][idx_id];
    if (id.empty()) {
      throw DataError(errc::non_numeric_cell,
                      "row " + std::to_string(line_no) + ": empty area id");
    }
    if (!seen.insert(id).second) {
      throw DataError(errc::duplicate_area_id, "duplicate area id '" + id + "'");
    }
    table.area_ids.push_back(id);
    table.y[r] = parse_cell(rows[r][idx_y], line_no, y_col);
    table.d[r] = parse_cell(rows[r][idx_d], line_no, d_col);
    if (!(table.d[r] > 0.0)) {
      throw DataError(errc::non_positive_variance,
                      "row " + std::to_string(line_no) + ", column '" + d_col +
                          "': variance must be positive");
    }
    for (std::size_t k = 0; k < idx_cov.size(); ++k) {
      table.x(r, 1 + static_cast<int>(k)) =
          parse_cell(rows[r][idx_cov[k]], line_no, covariate_cols[k]);
    }
  }
  return table;
}

SurveyDataset to_dataset(const SurveyTable& table) {
  SurveyDataset ds;
  ds.area_ids = table.area_ids;
  ds.y = table.y;
  ds.d = table.d;
  ds.x = table.x;
  return ds;
}

TruthSet to_truth(const SurveyTable& table) {
  TruthSet truth;
  truth.area_ids = table.area_ids;
  truth.z = table.y;
  truth.d = table.d;
  truth.x = table.x;
  return truth;
}

AreaGraph load_adjacency(const std::string& path, const std::vector<std::string>& area_ids) {
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(area_ids.size()); ++i) {
    if (!index.emplace(area_ids[i], i).second) {
      throw DataError(errc::duplicate_area_id, "duplicate area id '" + area_ids[i] + "'");
    }
  }
  const std::vector<std::string> lines = split_lines(read_file(path));
  std::vector<std::pair<int, int>> edges;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string line = trimmed(lines[ln]);
    const std::string at_line = " at line " + std::to_string(ln + 1);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv(line, static_cast<int>(ln + 1));
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(errc::malformed_edge_list,
                      "expected 'id,id'" + at_line + " of '" + path + "'");
    }
    const auto a = index.find(fields[0]);
    const auto b = index.find(fields[1]);
    if (a == index.end() || b == index.end()) {
      throw DataError(errc::unknown_area_id,
                      "unknown area id '" + (a == index.end() ? fields[0] : fields[1]) + "'" +
                          at_line);
    }
    if (a->second == b->second) {
      throw DataError(errc::self_loop, "self loop on '" + fields[0] + "'" + at_line);
    }
    edges.emplace_back(a->second, b->second);
  }
  return build_area_graph(static_cast<int>(area_ids.size()), std::move(edges));
}

std::vector<std::pair<std::string, std::string>> contiguity_from_geojson(
    const std::string& path, const std::string& id_property, ContiguityRule rule) {
  const json root = parse_geojson(path);
  const json& features = root["features"];

  std::vector<std::string> ids;
  std::set<std::string> unique_ids;
  std::vector<std::vector<std::vector<QuantPoint>>> feature_rings;
  for (std::size_t f = 0; f < features.size(); ++f) {
    const std::string id = feature_id(features[f], id_property, f);
    if (!unique_ids.insert(id).second) {
      throw DataError(errc::duplicate_feature_id, "feature id '" + id + "' appears twice");
    }
    ids.push_back(id);
    std::vector<std::vector<QuantPoint>> rings;
    if (!features[f].contains("geometry")) {
      throw DataError(errc::malformed_geojson, "feature '" + id + "' has no geometry");
    }
    collect_rings(features[f]["geometry"], id, rings);
    feature_rings.push_back(std::move(rings));
  }

  std::set<std::pair<int, int>> adjacent;
  auto connect = [&](const std::vector<int>& touching) {
    for (std::size_t a = 0; a < touching.size(); ++a) {
      for (std::size_t b = a + 1; b < touching.size(); ++b) {
        adjacent.emplace(std::min(touching[a], touching[b]),
                         std::max(touching[a], touching[b]));
      }
    }
  };

  if (rule == ContiguityRule::queen) {
    std::map<QuantPoint, std::vector<int>> by_point;
    for (int f = 0; f < static_cast<int>(feature_rings.size()); ++f) {
      std::set<QuantPoint> own;
      for (const auto& ring : feature_rings[f]) own.insert(ring.begin(), ring.end());
      for (const QuantPoint& p : own) by_point[p].push_back(f);
    }
    for (const auto& [point, touching] : by_point) connect(touching);
  } else {
    using Segment = std::array<std::int64_t, 4>;
    auto canonical = [](QuantPoint a, QuantPoint b) {
      if (b < a) std::swap(a, b);
      return Segment{a.first, a.second, b.first, b.second};
    };
    std::map<Segment, std::vector<int>> by_segment;
    for (int f = 0; f < static_cast<int>(feature_rings.size()); ++f) {
      std::set<Segment> own;
      for (const auto& ring : feature_rings[f]) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          if (ring[i] != ring[i + 1]) own.insert(canonical(ring[i], ring[i + 1]));
        }
      }
      for (const Segment& s : own) by_segment[s].push_back(f);
    }
    for (const auto& [segment, touching] : by_segment) connect(touching);
  }

  std::set<std::pair<std::string, std::string>> named;
  for (const auto& [a, b] : adjacent) {
    std::string ia = ids[a], ib = ids[b];
    if (ib < ia) std::swap(ia, ib);
    named.emplace(std::move(ia), std::move(ib));
  }
  return {named.begin(), named.end()};
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(errc::file_io, "cannot open '" + temp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(temp.c_str());
      throw DataError(errc::file_io, "write failure on '" + temp + "'");
    }
  }
  if (std::rename(temp.c_str(), path.c_str()) != 0) {
    std::remove(temp.c_str());
    throw DataError(errc::file_io, "cannot move '" + temp + "' onto '" + path + "'");
  }
}

std::string sha256_file(const std::string& path) {
  const std::string bytes = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw DataError(errc::file_io, "sha256 digest failed for '" + path + "'");
  static const char hex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xF];
  }
  return out;
}

void export_fit(const FitSummary& summary, const std::string& path) {
  std::string out = "id,mean,sd,lower,upper,selection_prob\n";
  for (const AreaSummary& area : summary.areas) {
    out += csv_escape(area.area_id);
    out += ',' + format_double(area.mean) + ',' + format_double(area.sd) + ',' +
           format_double(area.lower) + ',' + format_double(area.upper) + ',';
    if (summary.has_selection) out += format_double(area.selection_rate);
    out += '\n';
  }
  write_atomic(path, out);
}

std::vector<FitRow> load_fit_csv(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty() || split_csv(lines[0], 1) !=
                           std::vector<std::string>{"id", "mean", "sd", "lower", "upper",
                                                    "selection_prob"}) {
    throw DataError(errc::file_io, "'" + path + "' is not a fit summary CSV");
  }
  std::vector<FitRow> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (trimmed(lines[ln]).empty()) continue;
    const int line_no = static_cast<int>(ln + 1);
    const std::vector<std::string> fields = split_csv(lines[ln], line_no);
    if (fields.size() != 6) {
      throw DataError(errc::file_io, "line " + std::to_string(line_no) + " of '" + path +
                                         "' does not have 6 fields");
    }
    FitRow row;
    row.area_id = fields[0];
    row.mean = parse_cell(fields[1], line_no, "mean");
    row.sd = parse_cell(fields[2], line_no, "sd");
    row.lower = parse_cell(fields[3], line_no, "lower");
    row.upper = parse_cell(fields[4], line_no, "upper");
    if (!fields[5].empty()) row.selection_prob = parse_cell(fields[5], line_no, "selection_prob");
    rows.push_back(std::move(row));
  }
  return rows;
}

void export_geojson(const FitSummary& summary, const std::string& geojson_in,
                    const std::string& id_property, const std::string& path_out) {
  json root = parse_geojson(geojson_in);
  std::map<std::string, const AreaSummary*> by_id;
  for (const AreaSummary& area : summary.areas) by_id[area.area_id] = &area;

  std::vector<std::string> unmatched;
  std::set<std::string> seen;
  json& features = root["features"];
  for (std::size_t f = 0; f < features.size(); ++f) {
    const std::string id = feature_id(features[f], id_property, f);
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      unmatched.push_back(id);
      continue;
    }
    seen.insert(id);
    json& props = features[f]["properties"];
    props["mean"] = it->second->mean;
    props["sd"] = it->second->sd;
    props["lower"] = it->second->lower;
    props["upper"] = it->second->upper;
    if (summary.has_selection) props["selection_prob"] = it->second->selection_rate;
  }
  for (const auto& [id, area] : by_id) {
    if (!seen.count(id)) unmatched.push_back(id);
  }
  if (!unmatched.empty()) {
    std::string list;
    for (const std::string& id : unmatched) {
      if (!list.empty()) list += ", ";
      list += "'" + id + "'";
    }
    throw DataError(errc::id_mismatch, "unmatched ids between summary and geojson: " + list);
  }
  write_atomic(path_out, root.dump(2) + "\n");
}

void export_effects(const std::vector<std::string>& area_ids, const Vector& effects,
                    const std::string& path) {
  if (static_cast<Eigen::Index>(area_ids.size()) != effects.size()) {
    throw UsageError(errc::dimension_mismatch, "one effect per area id required");
  }
  std::string out = "id,effect\n";
  for (std::size_t i = 0; i < area_ids.size(); ++i) {
    out += csv_escape(area_ids[i]) + ',' + format_double(effects[static_cast<Eigen::Index>(i)]) +
           '\n';
  }
  write_atomic(path, out);
}

std::pair<std::vector<std::string>, Vector> load_effects(const std::string& path) {
  const std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty() || split_csv(lines[0], 1) != std::vector<std::string>{"id", "effect"}) {
    throw DataError(errc::file_io, "'" + path + "' is not an effects CSV");
  }
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (trimmed(lines[ln]).empty()) continue;
    const int line_no = static_cast<int>(ln + 1);
    const std::vector<std::string> fields = split_csv(lines[ln], line_no);
    if (fields.size() != 2) {
      throw DataError(errc::file_io,
                      "line " + std::to_string(line_no) + " of '" + path + "' needs 2 fields");
    }
    ids.push_back(fields[0]);
    values.push_back(parse_cell(fields[1], line_no, "effect"));
  }
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return {std::move(ids), std::move(v)};
}

void export_report(const SimulationReport& report, const std::string& path) {
  std::string out = "estimator,avg_mse,avg_coverage,avg_interval_score,avg_abs_bias\n";
  for (const EstimatorReport& er : report.estimators) {
    out += estimator_name(er.estimator);
    out += ',' + format_double(er.avg_mse) + ',';
    if (er.avg_coverage) out += format_double(*er.avg_coverage);
    out += ',';
    if (er.avg_interval_score) out += format_double(*er.avg_interval_score);
    out += ',' + format_double(er.avg_abs_bias) + '\n';
  }
  write_atomic(path, out);
}

void export_replications(const SimulationReport& report, const std::string& path) {
  std::string out = "estimator,g,mse\n";
  for (const EstimatorReport& er : report.estimators) {
    for (std::size_t g = 0; g < er.replication_mse.size(); ++g) {
      out += estimator_name(er.estimator);
      out += ',' + std::to_string(g) + ',' + format_double(er.replication_mse[g]) + '\n';
    }
  }
  write_atomic(path, out);
}

}  // namespace sae
