#pragma once

// Error-correction subsystem frames: verification of the Knill-Laflamme
// condition for a code/channel pair and synthesis of the isometry that
// factors the physical space into logical (x) gauge, together with the
// per-syndrome logical unitaries. Prebuilt frames cover the three-qubit
// bit-flip code, two-qubit Bell measurement teleportation, and the
// squeezed-cat bosonic code.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmsim/channels.hpp"
#include "nmsim/linalg.hpp"

namespace nmsim {

struct CodeSpec {
  Index dim = 0;
  std::vector<CVec> codewords;
  CMat projector;

  // Validates orthonormality and assembles the projector.
  static CodeSpec from_codewords(Index dim, std::vector<CVec> words,
                                 double t = tol::herm);
  Index logical_dim() const { return static_cast<Index>(codewords.size()); }
};

struct KlReport {
  bool passes = false;
  std::vector<double> d;
  double offdiagonal_residual = 0.0;
  double diagonal_residual = 0.0;
};

enum class FrameLayout {
  // isometry maps physical space to logical (x) gauge
  LogicalGauge,
  // isometry is a unitary on the gauge factor of a (gauge (x) logical)
  // composite; the logical subsystem is untouched by it
  GaugeFirst,
};

struct SubsystemFrame {
  Index dim_logical = 0;
  Index dim_gauge = 0;
  Index dim_physical = 0;
  FrameLayout layout = FrameLayout::LogicalGauge;
  // LogicalGauge: (dim_logical * dim_gauge) x dim_physical, orthonormal rows.
  // GaugeFirst: dim_gauge x dim_gauge unitary.
  CMat isometry;
  // Q_m per gauge label; recovery applies Q_m^dag after reading syndrome m.
  std::vector<CMat> logical_unitaries;
  std::vector<double> probabilities;  // d_m from the build channel; may be empty
  std::vector<std::string> gauge_labels;
  std::vector<int> dropped_kraus;  // indices dropped below the rank tolerance
  // Gauge axis position for each Kraus index of the build channel, -1 where
  // dropped. Empty for prebuilt frames with no originating channel.
  std::vector<int> kraus_to_gauge;
};

KlReport check_kl(const CodeSpec& code, const QuantumChannel& ch,
                  double t = tol::herm);

// Requires check_kl to pass. Without a hint the basis on each error subspace
// is {U_m |k>_C}, so every Q_m is the identity. With a unitary hint mapping
// the physical space onto logical (x) gauge (a stabilizer decoding circuit),
// the basis follows the hint and Q_m is the induced logical unitary.
SubsystemFrame build_frame(const CodeSpec& code, const QuantumChannel& ch,
                           const std::optional<CMat>& clifford_hint = {},
                           double rank_tol = 1e-12);

SubsystemFrame three_qubit_frame();
SubsystemFrame teleportation_frame();

// Bosonic frame from squeezed displaced Fock vectors
// S(r)(D(alpha) +- (-1)^n D(-alpha))|n>, orthonormalized in order
// (n=0 +, n=0 -, n=1 +, ...). Gauge levels are retained while the truncated
// vector's norm deficit stays below the guard; max_gauge = 0 keeps as many as
// pass. The logical basis is stored so that the two n=0 cat words map to
// (|0>_L +- |1>_L)/sqrt(2) (x) |0>_G.
SubsystemFrame squeezed_cat_frame(double alpha, double r, Index n_trunc,
                                  Index max_gauge = 0,
                                  double norm_guard = 1e-8);

// Tr_G[V_S rho V_S^dag]; throws if support leaks outside the frame domain.
CMat logical_state(const CMat& rho, const SubsystemFrame& frame,
                   double leak_tol = tol::herm);

// Residual of the defining relation V_S F_m|k>_C = sqrt(d_m) (Q_m|k>_L)(x)|m>_G
// maximized over all (k, m) with the channel the frame was built from.
double frame_relation_residual(const SubsystemFrame& frame,
                               const CodeSpec& code, const QuantumChannel& ch);

nlohmann::json frame_to_json(const SubsystemFrame& frame);
SubsystemFrame frame_from_json(const nlohmann::json& j);

// Three-qubit bit-flip code helpers.
CodeSpec three_qubit_code();
// Normalized single-flip stochastic channel {I, X1, X2, X3} with weights
// proportional to (1-p)^3 and p(1-p)^2.
QuantumChannel three_qubit_single_flip_channel(double p);

}  // namespace nmsim
