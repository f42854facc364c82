#include "nmsim/nmsim.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "nmsim/errors.hpp"
#include "nmsim/measures.hpp"
#include "nmsim/models.hpp"
#include "nmsim/qem.hpp"
#include "nmsim/scenario.hpp"

struct nmsim_scenario {
  nlohmann::json doc;
  std::string path;  // used to anchor error messages; empty for parsed text
};

namespace {

thread_local std::string g_last_error;

nmsim_status fail(nmsim_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

nmsim_status run_guarded(const std::function<void()>& body) {
  g_last_error.clear();
  try {
    body();
    return NMSIM_OK;
  } catch (const nmsim::ConfigError& e) {
    return fail(NMSIM_ERR_CONFIG, e.what());
  } catch (const nmsim::NumericalError& e) {
    return fail(NMSIM_ERR_NUMERICAL, e.what());
  } catch (const nmsim::DimensionError& e) {
    return fail(NMSIM_ERR_DIMENSION, e.what());
  } catch (const nmsim::InvariantViolation& e) {
    return fail(NMSIM_ERR_INVARIANT, e.what());
  } catch (const std::exception& e) {
    return fail(NMSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NMSIM_ERR_INTERNAL, "unknown failure");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nmsim_status require_args(bool ok) {
  if (ok) {
    g_last_error.clear();
    return NMSIM_OK;
  }
  return fail(NMSIM_ERR_INVALID_ARGUMENT, "null argument");
}

nmsim::ScenarioConfig config_of(const nmsim_scenario& s) {
  return nmsim::config_from_document(s.doc, s.path);
}

}  // namespace

extern "C" {

const char* nmsim_version(void) { return "1.0.0"; }

const char* nmsim_conventions_json(void) {
  static const std::string text =
      nlohmann::json{{"vectorization", "column_stacking"},
                     {"choi_normalization", "trace_one_for_tp"},
                     {"rate_convention", "unit_jump_pauli"}}
          .dump();
  return text.c_str();
}

const char* nmsim_last_error(void) { return g_last_error.c_str(); }

nmsim_status nmsim_scenario_load(const char* path, nmsim_scenario** out) {
  if (require_args(path && out) != NMSIM_OK) return NMSIM_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  return run_guarded([&]() {
    auto handle = std::make_unique<nmsim_scenario>();
    handle->path = path;
    handle->doc = nmsim::load_config_document(path);
    *out = handle.release();
  });
}

nmsim_status nmsim_scenario_parse(const char* json_text,
                                  nmsim_scenario** out) {
  if (require_args(json_text && out) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  return run_guarded([&]() {
    auto handle = std::make_unique<nmsim_scenario>();
    try {
      handle->doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw nmsim::ConfigError(std::string("invalid JSON: ") + e.what());
    }
    *out = handle.release();
  });
}

nmsim_status nmsim_scenario_override(nmsim_scenario* s,
                                     const char* assignment) {
  if (require_args(s && assignment) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() { nmsim::apply_override(s->doc, assignment); });
}

nmsim_status nmsim_scenario_validate(nmsim_scenario* s, char** report_out) {
  if (require_args(s && report_out) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  *report_out = nullptr;
  return run_guarded([&]() {
    const nmsim::ScenarioConfig cfg = config_of(*s);
    const nmsim::ValidationReport rep = nmsim::validate_config(cfg);
    std::string text;
    for (const std::string& note : rep.notes) {
      text += note;
      text += '\n';
    }
    *report_out = copy_string(text);
    if (!*report_out) throw std::bad_alloc();
  });
}

nmsim_status nmsim_scenario_run(nmsim_scenario* s, char** summary_json_out) {
  if (require_args(s && summary_json_out) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  *summary_json_out = nullptr;
  return run_guarded([&]() {
    const nmsim::ScenarioConfig cfg = config_of(*s);
    const nmsim::ScenarioResult result = nmsim::run_scenario_to_files(cfg);
    *summary_json_out = copy_string(result.summary.dump(2) + "\n");
    if (!*summary_json_out) throw std::bad_alloc();
  });
}

void nmsim_scenario_free(nmsim_scenario* s) { delete s; }

void nmsim_string_free(char* s) { std::free(s); }

nmsim_status nmsim_three_qubit_analytic(double p, double gamma, double t,
                                        double* f_out, double* rate_out) {
  if (require_args(f_out && rate_out) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() {
    const nmsim::ThreeQubitAnalytic a = nmsim::three_qubit_analytic(p, gamma, t);
    *f_out = a.f;
    *rate_out = a.rate;
  });
}

nmsim_status nmsim_teleportation_rate(double gamma, double t,
                                      double* rate_out) {
  if (require_args(rate_out != nullptr) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() {
    nmsim::CVec psi = nmsim::CVec::Zero(2);
    psi(0) = 1.0;
    *rate_out = nmsim::teleportation_analytic(gamma, t, psi).rate;
  });
}

nmsim_status nmsim_squeezed_cat_analytic(double lambda, double gamma,
                                         double t, double* contrast_out,
                                         double* rate_out) {
  if (require_args(contrast_out && rate_out) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() {
    const double s = 1.0 / std::sqrt(2.0);
    const nmsim::SqueezedCatAnalytic a =
        nmsim::squeezed_cat_analytic(lambda, gamma, t, s, s);
    *contrast_out = a.x_expectation;
    *rate_out = a.rate;
  });
}

nmsim_status nmsim_closed_form_decay(const char* kind, double p, double q,
                                     double lambda, double gamma,
                                     double t_start, double t_end,
                                     double* out) {
  if (require_args(kind && out) != NMSIM_OK) return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() {
    nmsim::ClosedFormKind k;
    const std::string name(kind);
    if (name == "three_qubit") {
      k = nmsim::ClosedFormKind::ThreeQubit;
    } else if (name == "squeezed_cat") {
      k = nmsim::ClosedFormKind::SqueezedCat;
    } else if (name == "teleportation") {
      k = nmsim::ClosedFormKind::Teleport;
    } else {
      throw nmsim::ConfigError("unknown closed form kind '" + name + "'");
    }
    nmsim::ClosedFormParams params;
    params.p = p;
    params.q = q;
    params.lambda = lambda;
    params.gamma = gamma;
    params.t_start = t_start;
    params.t_end = t_end;
    *out = nmsim::closed_form_R(k, params);
  });
}

nmsim_status nmsim_unbiased_bound(double p, double epsilon, double delta,
                                  double* samples_out) {
  if (require_args(samples_out != nullptr) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() {
    *samples_out = nmsim::unbiased_bound(p, epsilon, delta).samples;
  });
}

nmsim_status nmsim_cost_after_qec(double samples, double decay_integral,
                                  double* samples_out) {
  if (require_args(samples_out != nullptr) != NMSIM_OK)
    return NMSIM_ERR_INVALID_ARGUMENT;
  return run_guarded([&]() {
    *samples_out = nmsim::cost_after_qec(samples, decay_integral);
  });
}

}  // extern "C"
