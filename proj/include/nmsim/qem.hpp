#pragma once

// Sampling-cost bounds for stochastic quantum error mitigation and their
// reduction under error-corrected dynamics with negative decay rates. Bounds
// are returned as reals; ceiling is the caller's business.

#include <json.hpp>

#include "nmsim/channels.hpp"
#include "nmsim/linalg.hpp"

namespace nmsim {

struct QemBound {
  double samples = 0.0;
  double epsilon = 0.0;  // failure probability in (0, 1)
  double delta = 0.0;    // accuracy target > 0
  double b_max = 0.0;    // maximum bias; fixed 0 in this specialization
  nlohmann::json context;

  nlohmann::json to_json() const;
};

// log(2/eps) / (2 delta^2 (1-2p)^2) for a bit-flip error weight p.
QemBound unbiased_bound(double p, double epsilon, double delta);

// M e^{-4R} where R is the integrated negative-rate weight accumulated
// between the two error levels.
double cost_after_qec(double m_p, double R);

// [D(rho, sigma) / D(E(rho), E(sigma))]^2 log(2/eps) / (2 delta^2) for a
// caller-supplied candidate pair; throws when the noisy pair is numerically
// indistinguishable.
QemBound distinguishability_bound(const DensityMatrix& rho,
                                  const DensityMatrix& sigma,
                                  const QuantumChannel& ch, double epsilon,
                                  double delta);

// Maximizes distinguishability_bound over antipodal pure qubit pairs with a
// lattice sweep plus local golden-section refinement.
QemBound sweep_orthogonal_pairs(const QuantumChannel& ch, double epsilon,
                                double delta, int n_grid = 64);

}  // namespace nmsim
