#pragma once

// The three scenario models: continuous feedback correction of the
// three-qubit bit-flip code, Bell-measurement teleportation with feedback
// recovery, and the squeezed-cat bosonic code under its subsystem-frame
// dissipator. Each model packages a GKSL generator, the matching subsystem
// frame, the logical embedding used for tomography, and closed-form oracles
// for the observable and the dominant canonical rate.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmsim/channels.hpp"
#include "nmsim/dynamics.hpp"
#include "nmsim/frames.hpp"
#include "nmsim/linalg.hpp"
#include "nmsim/measures.hpp"

namespace nmsim {

struct ThreeQubitAnalytic {
  double f = 0.0;     // logical flip weight
  double rate = 0.0;  // signed canonical rate f'/(1-2f)
};

// f(t) = (1-e^{-gamma t}) p^2(3-2p) + e^{-gamma t} p and its canonical rate.
ThreeQubitAnalytic three_qubit_analytic(double p, double gamma, double t);

// (1-e^{-gamma t})|psi><psi| + e^{-gamma t} rho0; empty rho0 means the
// maximally mixed state the Bell-measurement statistics enforce.
CMat teleportation_state(double gamma, double t, const CVec& psi,
                         const CMat& rho0 = CMat());

struct TeleportationAnalytic {
  CMat state;
  double rate = 0.0;  // common value of the three equal Pauli rates
};

// Rate -gamma e^{-gamma t} / (4(1 - e^{-gamma t})); singular at t = 0, which
// is reported as an error rather than a number.
TeleportationAnalytic teleportation_analytic(double gamma, double t,
                                             const CVec& psi,
                                             const CMat& rho0 = CMat());

struct SqueezedCatAnalytic {
  CMat state;                  // 2x2 logical state
  double rate = 0.0;           // -|Lambda|^2 gamma e^{-gamma t}
  double x_expectation = 0.0;  // 2 Re(c0 conj(c1)) e^{-2|Lambda|^2 e^{-gamma t}}
};

SqueezedCatAnalytic squeezed_cat_analytic(cplx lambda, double gamma, double t,
                                          cplx c0, cplx c1);

// Factorized subsystem-frame form of the displacement error D(beta):
// exp(i phi Z_L) (x) conditional displacement, phi = 2 alpha e^{-r} Im(beta),
// Lambda = Re(beta) e^r + i Im(beta) e^{-r}. Throws NumericalError when the
// gauge displacement does not fit the truncation within deficit 1e-8.
CMat displacement_error_subsystem(cplx beta, double alpha, double r,
                                  Index n_trunc);

// Continuous feedback correction of the three-qubit bit-flip code. The
// physical state stays in the codeword basis; the recovery jump operators
// rotate through the frame isometry, collapse the syndrome to 00, and apply
// the frame's logical correction.
struct ThreeQubitModel {
  double p = 0.0;
  double gamma = 0.0;
  SubsystemFrame frame;
  GkslGenerator generator;
  QuantumChannel recovery;  // one-shot recovery channel {R_m}
  QuantumChannel noise;     // iid bit-flip product channel, 8 Kraus terms

  static ThreeQubitModel make(double p, double gamma);
  // Encode a logical element into the codeword basis and corrupt it with the
  // iid flip channel; the logical action of the corruption is exactly the
  // weight-p bit-flip map.
  LogicalEmbedding embedding() const;
  CMat initial_state(const CVec& logical) const;
  // Discrete protocol chain on stage indices {1, 2, 3}: identity, after
  // noise, after noise + one-shot recovery. intermediate_map(fam, 2, 3)
  // reconstructs the non-CP inter-stage map of weight -p(1-p).
  MapFamily stage_family() const;
};

// Bell-measurement teleportation with feedback recovery, simulated natively
// in the subsystem frame (syndrome pair (x) logical). The stored frame's
// gauge rotation is the identity because the simulation basis is already the
// measurement basis.
struct TeleportationModel {
  CVec psi;
  double gamma = 0.0;
  SubsystemFrame frame;
  GkslGenerator generator;

  static TeleportationModel make(const CVec& psi, double gamma);
  // u -> (1/4) sum_{m m'} |m><m'| (x) Q_m u Q_{m'}^dag, the gauge-correlated
  // image the Bell rotation produces from psi (x) Phi00.
  LogicalEmbedding embedding() const;
  CMat initial_state() const;
  // Markovian negative control: the semigroup relaxing every logical state
  // straight to |psi><psi| whose endpoint matches the protocol's logical
  // trajectory from the maximally mixed start.
  MapFamily relaxation_family(const std::vector<double>& times) const;
};

// Squeezed-cat code under the subsystem-frame dissipator Z_L (x) a_G,
// simulated natively on logical (x) truncated gauge Fock space.
struct SqueezedCatModel {
  double alpha = 0.0;
  double r = 0.0;
  cplx lambda;  // effective gauge displacement
  double gamma = 0.0;
  Index n_trunc = 0;
  SubsystemFrame frame;
  GkslGenerator generator;

  static SqueezedCatModel make(double alpha, double r, cplx lambda,
                               double gamma, Index n_trunc);
  // |i><j| -> |i><j| (x) |(-1)^i Lambda><(-1)^j Lambda| with coherent vectors
  // projected to the truncation and renormalized.
  LogicalEmbedding embedding() const;
  CMat initial_state(cplx c0, cplx c1) const;
};

enum class ModelKind { ThreeQubit, Teleportation, SqueezedCat };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

// Everything the scenario runner needs: generator + frame + embedding +
// initial state, the physical-state observable, and the closed-form oracles.
struct ModelBundle {
  ModelKind kind = ModelKind::ThreeQubit;
  GkslGenerator generator;
  SubsystemFrame frame;
  LogicalEmbedding embedding;
  CMat initial;
  std::string observable_name;
  std::function<double(const CMat&)> observable;      // physical state -> value
  std::function<double(double)> analytic_observable;  // t -> value
  std::function<double(double)> analytic_rate;        // t -> dominant rate
  ClosedFormKind closed_form = ClosedFormKind::ThreeQubit;
  ClosedFormParams closed_form_params;  // window fields left to the caller
  nlohmann::json effective_params;
  // Markovian negative-control family over the given grid; only the
  // teleportation model provides one.
  std::function<MapFamily(const std::vector<double>&)> control_family;
};

// Scenario parameter defaults; build_model merges user params over these and
// rejects unknown keys.
nlohmann::json default_model_params(ModelKind kind);
ModelBundle build_model(ModelKind kind, const nlohmann::json& params);

}  // namespace nmsim
