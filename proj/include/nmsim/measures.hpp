#pragma once

// Non-Markovianity quantifiers for logical map families: the trace-norm
// backflow (RHP) density and integral, the trace-distance (BLP) measure with
// a Bloch-sphere search, and the signed-decay-rate measure together with
// closed-form references for the three reference models.

#include <json.hpp>

#include <string>
#include <vector>

#include "nmsim/dynamics.hpp"
#include "nmsim/linalg.hpp"

namespace nmsim {

enum class MeasureKind { Rhp, Blp, DecayRate };

std::string measure_kind_name(MeasureKind kind);

struct BlpDiagnostics {
  double theta = 0.0;
  double phi = 0.0;
  CVec state1;
  CVec state2;
  // trace distances of the optimal pair at the window grid times
  std::vector<double> trace_distances;
  // best value after the direction grid and after each refinement pass
  std::vector<double> stage_values;
};

struct MeasureResult {
  MeasureKind kind = MeasureKind::DecayRate;
  double value = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<double> sample_times;
  std::vector<double> integrand;
  // decay rate only: one negative-part integral per canonical channel
  std::vector<double> channel_integrals;
  BlpDiagnostics blp;

  nlohmann::json to_json() const;
};

// Backflow density (||Choi of the intermediate map over [t, t+delta]||_1 - 1)
// / delta. The family must resolve both endpoints; the intermediate map must
// be invertible at t.
double rhp_density(const MapFamily& fam, double t, double delta);

// Trapezoidal integral of rhp_density over the window grid points. Window
// endpoints must lie on the family grid; the family must also resolve
// t_end + delta.
MeasureResult rhp_measure(const MapFamily& fam, double t_start, double t_end,
                          double delta);

struct BlpSearchConfig {
  int n_grid = 64;
  int refine_iters = 20;
};

// Sum of positive trace-distance increments along the window grid for the
// antipodal pure pair with Bloch direction (theta, phi).
double blp_pair_value(const MapFamily& fam, double t_start, double t_end,
                      double theta, double phi);

// Maximum of blp_pair_value over orthogonal pure pairs: a Fibonacci lattice
// of search.n_grid directions followed by search.refine_iters alternating
// golden-section passes in theta and phi. Qubit families only.
MeasureResult blp_measure(const MapFamily& fam, double t_start, double t_end,
                          const BlpSearchConfig& search = {});

// Sum over channels of the trapezoidal integral of (|rate| - rate) / 2.
// rates[i] holds the per-channel rates at times[i]; rows must have equal
// length.
MeasureResult decay_rate_measure(const std::vector<double>& times,
                                 const std::vector<std::vector<double>>& rates);

struct RateSamples {
  std::vector<double> times;
  // single-Pauli-convention canonical rates, descending within each row
  std::vector<std::vector<double>> rates;
};

// Canonical rates of the finite-difference generator at n_points uniform
// times. Sampling starts at max(t_start, family origin + stencil_h) so the
// centered stencil never reaches before the origin.
RateSamples sample_canonical_rates(const MapFamily& fam, double t_start,
                                   double t_end, int n_points,
                                   double stencil_h);

enum class ClosedFormKind { ThreeQubit, SqueezedCat, Teleport };

struct ClosedFormParams {
  double p = 0.0;       // three-qubit: initial flip weight
  double q = 0.0;       // three-qubit: corrected flip weight
  double lambda = 0.0;  // squeezed cat: |Lambda|
  double gamma = 0.0;   // recovery / loss rate
  double t_start = 0.0;
  double t_end = 0.0;
};

// Reference decay-rate values: (1/2) log((1-2q)/(1-2p));
// lambda^2 (1 - e^{-gamma t_end}); log((1-e^{-gamma t_end}) /
// (1-e^{-gamma t_start})). Throws ConfigError outside each form's domain.
double closed_form_R(ClosedFormKind kind, const ClosedFormParams& params);

}  // namespace nmsim
