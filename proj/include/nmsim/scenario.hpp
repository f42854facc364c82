#pragma once

// Batch scenario execution: config parsing and validation, trajectory +
// map-family computation, measure evaluation, sampling-cost bounds, and the
// CSV/JSON renderers. Everything here is deterministic; identical configs
// produce byte-identical outputs.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmsim/measures.hpp"
#include "nmsim/models.hpp"
#include "nmsim/qem.hpp"

namespace nmsim {

struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;

  std::vector<double> points() const;
};

struct QemConfig {
  double epsilon = 0.05;
  double delta = 0.01;
};

struct OutputConfig {
  std::string trajectory_csv;
  std::string summary_json;
};

// Numerical policies used by the runner; these are the effective defaults
// `validate` reports. All are overridable through the config's `numerics`
// block.
struct NumericsConfig {
  double rhp_delta = 1e-4;     // step for the divisibility density
  double rate_stencil = 1e-5;  // finite-difference half-step
  int rate_points = 400;       // decay-rate integration grid
  int blp_grid = 64;           // pair-search lattice size
  int blp_refine = 20;         // pair-search refinement passes
};

struct ScenarioConfig {
  ModelKind scenario = ModelKind::ThreeQubit;
  nlohmann::json params;  // raw user block; defaults merge at build time
  TimeGrid times;
  std::vector<MeasureKind> measures;  // empty list means all three
  std::optional<QemConfig> qem;
  OutputConfig output;
  NumericsConfig numerics;

  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Reads and parses a config file; syntax errors carry path:line:column.
nlohmann::json load_config_document(const std::string& path);

// from_json with every error message prefixed by the config path.
ScenarioConfig config_from_document(const nlohmann::json& doc,
                                    const std::string& path_for_messages = "");

// load_config_document + config_from_document.
ScenarioConfig load_config(const std::string& path);

// `key.path=value` assignment into a raw config document; the value parses
// as JSON when possible and falls back to a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

struct ValidationReport {
  nlohmann::json effective_config;   // with defaults folded in
  std::vector<std::string> notes;    // human-readable defaults listing
};

// Full validation without execution: builds the model (parameter domain
// checks included) and verifies grid, measure windows, and output paths.
ValidationReport validate_config(const ScenarioConfig& cfg);

struct ScenarioResult {
  std::string trajectory_csv;  // rendered text, one row per grid point
  nlohmann::json summary;
};

// Pure computation; writes nothing.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Executes and writes both output files.
ScenarioResult run_scenario_to_files(const ScenarioConfig& cfg);

}  // namespace nmsim
