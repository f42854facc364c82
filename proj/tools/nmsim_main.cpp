// Command-line front end. All simulator work goes through the C API in
// nmsim/nmsim.h; this file only handles argument parsing and presentation.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmsim/nmsim.h"

namespace {

int exit_code_for(nmsim_status status) {
  if (status == NMSIM_OK) return 0;
  if (status == NMSIM_ERR_CONFIG || status == NMSIM_ERR_INVALID_ARGUMENT)
    return 2;
  return 3;
}

int report_failure(nmsim_status status) {
  std::cerr << "error: " << nmsim_last_error() << "\n";
  return exit_code_for(status);
}

struct ScenarioHandle {
  nmsim_scenario* ptr = nullptr;
  ~ScenarioHandle() { nmsim_scenario_free(ptr); }
};

int load_scenario(const std::string& config_path,
                  const std::vector<std::string>& overrides,
                  ScenarioHandle& handle) {
  nmsim_status status = nmsim_scenario_load(config_path.c_str(), &handle.ptr);
  if (status != NMSIM_OK) return report_failure(status);
  for (const std::string& assignment : overrides) {
    status = nmsim_scenario_override(handle.ptr, assignment.c_str());
    if (status != NMSIM_OK) return report_failure(status);
  }
  return 0;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int run_command(const std::string& config_path,
                const std::vector<std::string>& overrides) {
  ScenarioHandle handle;
  if (int rc = load_scenario(config_path, overrides, handle)) return rc;

  char* summary_text = nullptr;
  const nmsim_status status = nmsim_scenario_run(handle.ptr, &summary_text);
  if (status != NMSIM_OK) return report_failure(status);

  nlohmann::json summary;
  try {
    summary = nlohmann::json::parse(summary_text);
  } catch (...) {
    nmsim_string_free(summary_text);
    std::cerr << "error: summary output was not valid JSON\n";
    return 3;
  }
  nmsim_string_free(summary_text);

  std::cout << "scenario: "
            << summary["config"]["scenario"].get<std::string>() << "\n";
  std::cout << "observable: " << summary["observable"].get<std::string>()
            << " (max abs error vs analytic "
            << fmt_g(summary["analytic_comparison"]["observable_max_abs_error"]
                         .get<double>())
            << ")\n";
  for (const auto& measure : summary["measures"]) {
    std::cout << measure["kind"].get<std::string>() << " = "
              << fmt_g(measure["value"].get<double>()) << " ["
              << measure["family"].get<std::string>() << "]\n";
  }
  if (summary.contains("qem")) {
    const auto& qem = summary["qem"];
    std::cout << "qem samples: "
              << fmt_g(qem["samples_before"]["samples"].get<double>())
              << " -> "
              << fmt_g(qem["samples_after"]["samples"].get<double>())
              << " (predicted "
              << fmt_g(qem["samples_predicted_from_decay"].get<double>())
              << ")\n";
  }
  std::cout << "wrote "
            << summary["config"]["output"]["trajectory_csv"]
                   .get<std::string>()
            << "\n";
  std::cout << "wrote "
            << summary["config"]["output"]["summary_json"].get<std::string>()
            << "\n";
  return 0;
}

int validate_command(const std::string& config_path,
                     const std::vector<std::string>& overrides) {
  ScenarioHandle handle;
  if (int rc = load_scenario(config_path, overrides, handle)) return rc;

  char* report = nullptr;
  const nmsim_status status = nmsim_scenario_validate(handle.ptr, &report);
  if (status != NMSIM_OK) return report_failure(status);
  std::cout << "OK\n" << report;
  nmsim_string_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Subsystem-frame simulator: feedback-corrected logical dynamics, "
      "backflow measures, and mitigation sampling costs"};
  app.set_version_flag("--version", std::string(nmsim_version()));
  app.require_subcommand(1);

  std::string run_config;
  std::vector<std::string> run_overrides;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Execute a scenario and write its outputs");
  run_cmd->add_option("config", run_config, "Scenario config (JSON)")
      ->required();
  run_cmd->add_option("--override", run_overrides,
                      "key.path=value override (repeatable)");

  std::string validate_config_path;
  std::vector<std::string> validate_overrides;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "Check a config and list effective settings");
  validate_cmd
      ->add_option("config", validate_config_path, "Scenario config (JSON)")
      ->required();
  validate_cmd->add_option("--override", validate_overrides,
                           "key.path=value override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return run_command(run_config, run_overrides);
  return validate_command(validate_config_path, validate_overrides);
}
