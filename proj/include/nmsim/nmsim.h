#ifndef NMSIM_H
#define NMSIM_H

/* C interface to the simulator. Every fallible call returns a status code;
 * on failure a thread-local message is available through nmsim_last_error.
 * Strings returned through char** outputs are heap-allocated and must be
 * released with nmsim_string_free. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nmsim_status {
  NMSIM_OK = 0,
  NMSIM_ERR_CONFIG = 2,
  NMSIM_ERR_NUMERICAL = 3,
  NMSIM_ERR_DIMENSION = 4,
  NMSIM_ERR_INVARIANT = 5,
  NMSIM_ERR_INVALID_ARGUMENT = 6,
  NMSIM_ERR_INTERNAL = 7
} nmsim_status;

/* Opaque scenario handle: a parsed config document plus any overrides. */
typedef struct nmsim_scenario nmsim_scenario;

/* Semantic library version (static storage, do not free). */
const char* nmsim_version(void);

/* JSON object naming the vectorization, Choi normalization, and rate
 * conventions (static storage, do not free). */
const char* nmsim_conventions_json(void);

/* Message of the last failure on the calling thread; empty string when the
 * last call succeeded (static storage, do not free). */
const char* nmsim_last_error(void);

/* Parse a config file into a scenario handle. Only JSON syntax is checked
 * here so overrides can still amend the document; field validation happens
 * in nmsim_scenario_validate and nmsim_scenario_run. */
nmsim_status nmsim_scenario_load(const char* path, nmsim_scenario** out);

/* Parse a config from a JSON string (syntax check only, as with load). */
nmsim_status nmsim_scenario_parse(const char* json_text, nmsim_scenario** out);

/* Apply one `key.path=value` override to the underlying document. The value
 * is parsed as JSON when possible and taken as a string otherwise. */
nmsim_status nmsim_scenario_override(nmsim_scenario* s,
                                     const char* assignment);

/* Full validation without execution. On success *report_out holds a
 * newline-separated listing of the effective settings. */
nmsim_status nmsim_scenario_validate(nmsim_scenario* s, char** report_out);

/* Execute the scenario and write the configured output files. On success
 * *summary_json_out holds the summary document. */
nmsim_status nmsim_scenario_run(nmsim_scenario* s, char** summary_json_out);

void nmsim_scenario_free(nmsim_scenario* s);

/* Release a string returned through a char** output. */
void nmsim_string_free(char* s);

/* Closed-form oracles.
 * Three-qubit feedback code: logical flip weight f(t) and its signed
 * canonical rate f'(t) / (1 - 2 f(t)). */
nmsim_status nmsim_three_qubit_analytic(double p, double gamma, double t,
                                        double* f_out, double* rate_out);

/* Teleportation relaxation: the common value of the three equal canonical
 * rates, -gamma e^{-gamma t} / (4 (1 - e^{-gamma t})); t = 0 is an error. */
nmsim_status nmsim_teleportation_rate(double gamma, double t,
                                      double* rate_out);

/* Squeezed cat: dephasing contrast m(t) = exp(-2 lambda^2 e^{-gamma t}) and
 * the signed rate -lambda^2 gamma e^{-gamma t}. */
nmsim_status nmsim_squeezed_cat_analytic(double lambda, double gamma,
                                         double t, double* contrast_out,
                                         double* rate_out);

/* Reference decay-rate integrals; kind is "three_qubit", "squeezed_cat", or
 * "teleportation". Unused parameters for a kind are ignored. */
nmsim_status nmsim_closed_form_decay(const char* kind, double p, double q,
                                     double lambda, double gamma,
                                     double t_start, double t_end,
                                     double* out);

/* Worst-case sample count log(2/eps) / (2 delta^2 (1 - 2p)^2) for an
 * unbiased mitigated estimator against flip weight p. */
nmsim_status nmsim_unbiased_bound(double p, double epsilon, double delta,
                                  double* samples_out);

/* Sample count after running the corrector for decay integral R:
 * samples * exp(-4 R). */
nmsim_status nmsim_cost_after_qec(double samples, double decay_integral,
                                  double* samples_out);

#ifdef __cplusplus
}
#endif

#endif /* NMSIM_H */
