#pragma once

// Quantum channel representations and conversions. A channel can be held as
// a Kraus list, as a superoperator acting on column-stacked density matrices,
// or as a Choi matrix built from the normalized maximally entangled state
// (so trace-preserving maps have unit-trace Choi matrices).

#include <vector>

#include "nmsim/linalg.hpp"

namespace nmsim {

struct QuantumChannel {
  std::vector<CMat> kraus;
  Index dim_in = 0;
  Index dim_out = 0;

  static QuantumChannel from_kraus(std::vector<CMat> ops);
  CMat apply(const CMat& rho) const;
  // max-abs deviation of sum_m K_m^dag K_m from identity
  double tp_defect() const;
  bool is_trace_preserving(double t = tol::tp) const { return tp_defect() <= t; }
};

struct Superoperator {
  CMat m;  // (dim_out^2) x (dim_in^2)
  Index dim_in = 0;
  Index dim_out = 0;

  static Superoperator identity(Index dim);
  CMat apply(const CMat& rho) const;
  // composition (this after first): acts as this(first(rho))
  Superoperator compose_after(const Superoperator& first) const;
  double tp_defect() const;
  bool is_trace_preserving(double t = tol::tp) const { return tp_defect() <= t; }
  double hermiticity_preservation_defect() const;
};

struct ChoiMatrix {
  CMat m;  // (dim_out * dim_in) square, normalized by dim_in
  Index dim_in = 0;
  Index dim_out = 0;
};

struct CpReport {
  bool is_cp = false;
  double min_eigenvalue = 0.0;
};

Superoperator kraus_to_superoperator(const QuantumChannel& ch);
ChoiMatrix superoperator_to_choi(const Superoperator& s);
Superoperator choi_to_superoperator(const ChoiMatrix& c);
ChoiMatrix kraus_to_choi(const QuantumChannel& ch);
// Requires the Choi matrix to be CP within tolerance; near-zero components
// are dropped.
QuantumChannel choi_to_kraus(const ChoiMatrix& c, double rank_cutoff = 1e-12);
QuantumChannel superoperator_to_kraus(const Superoperator& s,
                                      double rank_cutoff = 1e-12);

// Hermiticity of the Choi matrix is checked first (throws beyond tol::herm);
// is_cp holds when the smallest eigenvalue is above -tol::psd_scale * dim.
CpReport cp_check(const ChoiMatrix& c);

// Convenience single-qubit channels (weights restricted to [0, 1]).
QuantumChannel bit_flip_channel(double weight);
QuantumChannel phase_flip_channel(double weight);
QuantumChannel depolarizing_channel(double weight);

// Formal Pauli mixture as a superoperator; weights may be any reals, so this
// can express non-CP maps such as inverse bit-flips.
Superoperator pauli_mix_superoperator(double wi, double wx, double wy,
                                      double wz);

CMat pauli_x();
CMat pauli_y();
CMat pauli_z();

}  // namespace nmsim
