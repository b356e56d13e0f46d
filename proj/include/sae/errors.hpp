#pragma once

#include <stdexcept>
#include <string>

namespace sae {

// Machine-readable failure codes carried by every sae exception.
enum class errc {
  // graph construction / spatial structure
  unknown_area_id,
  self_loop,
  empty_graph,
  duplicate_edge,
  not_symmetric,
  negative_eigenvalue,
  no_edges,
  zero_marginal_variance,
  zero_variance,
  // sampling / numerics
  non_finite_tilt,
  not_positive_definite,
  invalid_hyperparameter,
  invalid_probability,
  singular_conditional,
  // model-fitting inputs
  constant_response,
  too_few_areas,
  missing_graph,
  rank_deficient_design,
  non_positive_variance,
  dimension_mismatch,
  // simulation study
  non_positive_truth,
  inverted_interval,
  // file I/O
  file_io,
  missing_column,
  non_numeric_cell,
  duplicate_area_id,
  malformed_edge_list,
  malformed_geojson,
  missing_id_property,
  duplicate_feature_id,
  id_mismatch,
  // programmatic misuse (bad configuration values, not bad data)
  invalid_argument
};

const char* errc_name(errc code) noexcept;

// Base class for all failures thrown by this library.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

// Problems with user-supplied data: files, datasets, graphs, id mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdowns: indefinite precision matrices, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration passed by calling code (bad sizes, bad ranges).
class UsageError : public Error {
 public:
  using Error::Error;
};

inline const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::unknown_area_id: return "unknown_area_id";
    case errc::self_loop: return "self_loop";
    case errc::empty_graph: return "empty_graph";
    case errc::duplicate_edge: return "duplicate_edge";
    case errc::not_symmetric: return "not_symmetric";
    case errc::negative_eigenvalue: return "negative_eigenvalue";
    case errc::no_edges: return "no_edges";
    case errc::zero_marginal_variance: return "zero_marginal_variance";
    case errc::zero_variance: return "zero_variance";
    case errc::non_finite_tilt: return "non_finite_tilt";
    case errc::not_positive_definite: return "not_positive_definite";
    case errc::invalid_hyperparameter: return "invalid_hyperparameter";
    case errc::invalid_probability: return "invalid_probability";
    case errc::singular_conditional: return "singular_conditional";
    case errc::constant_response: return "constant_response";
    case errc::too_few_areas: return "too_few_areas";
    case errc::missing_graph: return "missing_graph";
    case errc::rank_deficient_design: return "rank_deficient_design";
    case errc::non_positive_variance: return "non_positive_variance";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::non_positive_truth: return "non_positive_truth";
    case errc::inverted_interval: return "inverted_interval";
    case errc::file_io: return "file_io";
    case errc::missing_column: return "missing_column";
    case errc::non_numeric_cell: return "non_numeric_cell";
    case errc::duplicate_area_id: return "duplicate_area_id";
    case errc::malformed_edge_list: return "malformed_edge_list";
    case errc::malformed_geojson: return "malformed_geojson";
    case errc::missing_id_property: return "missing_id_property";
    case errc::duplicate_feature_id: return "duplicate_feature_id";
    case errc::id_mismatch: return "id_mismatch";
    case errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace sae
