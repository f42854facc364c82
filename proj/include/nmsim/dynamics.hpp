#pragma once

// GKSL propagation and the reduced-dynamics toolchain: sparse Liouvillian
// assembly, step propagators that exponentiate per connected component,
// logical map families reconstructed by tomography through a subsystem
// frame, intermediate-map inversion, finite-difference generators, and the
// canonical decomposition with signed decay rates.

#include <Eigen/SparseCore>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nmsim/channels.hpp"
#include "nmsim/frames.hpp"
#include "nmsim/linalg.hpp"

namespace nmsim {

struct GkslGenerator {
  Index dim = 0;
  CMat hamiltonian;
  std::vector<std::pair<CMat, double>> dissipators;  // (jump op, rate >= 0)

  // Validates dimensions, Hermiticity of the Hamiltonian, and rate signs.
  static GkslGenerator make(Index dim, CMat hamiltonian,
                            std::vector<std::pair<CMat, double>> dissipators);
  // -i[H, rho] + sum_k rate_k (L rho L^dag - {L^dag L, rho}/2), densely.
  CMat apply(const CMat& rho) const;
};

// Column-stacking Liouvillian matrix; exact structural zeros are skipped so
// the sparsity graph reflects the physical couplings.
Eigen::SparseMatrix<cplx> liouvillian_matrix(const GkslGenerator& gen);

// exp(L dt) applied blockwise: the vectorized index graph of the sparse
// Liouvillian is split into connected components and each component is
// exponentiated densely. Exponentials are cached per distinct step (matched
// with relative tolerance 1e-14, so repeated grid steps reuse one set).
class StepPropagator {
 public:
  explicit StepPropagator(const Eigen::SparseMatrix<cplx>& liouv);
  Index dim() const { return dim_; }
  Index component_count() const { return static_cast<Index>(comps_.size()); }
  Index largest_component() const;
  CVec apply(double dt, const CVec& v) const;

 private:
  const std::vector<CMat>& exps_for(double dt) const;
  Index dim_ = 0;
  std::vector<std::vector<Index>> comps_;
  std::vector<CMat> sub_;
  mutable std::vector<std::pair<double, std::vector<CMat>>> cache_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::string metadata;
};

// Time-independent propagation over a strictly increasing grid; times[0] is
// the initial-condition time. Every state is re-validated after each step.
Trajectory propagate(const GkslGenerator& gen, const DensityMatrix& rho0,
                     const std::vector<double>& times,
                     const std::string& metadata = "");

struct MapFamily {
  double t1 = 0.0;
  std::vector<double> times;
  std::vector<Superoperator> maps;       // logical-dimension superoperators
  std::vector<double> invertibility;     // condition number per time
  // Optional continuous evaluator for off-grid times (t >= t1).
  std::function<Superoperator(double)> evaluator;

  Index dim() const { return maps.empty() ? 0 : maps.front().dim_in; }
  // Grid map at the exact grid time (tolerant lookup), else the evaluator.
  Superoperator map_at(double t) const;
  Index grid_index(double t) const;  // -1 sentinel via throw on miss
};

// Map family of a time-independent generator acting directly on the logical
// space: maps[i] = exp(L (times[i] - times[0])).
MapFamily semigroup_family(const Superoperator& liouvillian,
                           const std::vector<double>& times);

// How a logical operator basis element sits inside the full space at the
// family origin. Models supply this; the trace of the embedded element must
// equal the trace of the logical element.
struct LogicalEmbedding {
  Index dim_logical = 0;
  std::function<CMat(const CMat&)> embed;
};

// Tomographic reconstruction of E_{t1 -> t}: embed each logical matrix unit,
// propagate it through the full dynamics, rotate by the frame, and trace out
// the gauge factor. The returned family carries a continuous evaluator that
// steps from the nearest stored grid state.
MapFamily logical_map_family(const GkslGenerator& gen,
                             const LogicalEmbedding& embedding,
                             const SubsystemFrame& frame,
                             const std::vector<double>& times);

// maps[s] o pinv(maps[t]); the pseudo-inverse refuses condition numbers
// above tol::cond_cap instead of regularizing silently.
Superoperator intermediate_map(const MapFamily& fam, double t, double s);

// Central-difference time-local generator
//   L(t) = [E(t+h) - E(t-h)]/(2h) o pinv(E(t)).
// Off-grid stencil points require the family evaluator. The left stencil
// point must not fall below the family origin.
Superoperator generator_from_family(const MapFamily& fam, double t, double h);

struct CanonicalGenerator {
  double time = 0.0;
  CMat hamiltonian_part;
  std::vector<CMat> lindblad_ops;  // traceless, HS-orthonormal
  std::vector<double> rates;       // signed, unit-HS-norm convention
  double symmetrization_residual = 0.0;
  double reassembly_residual = 0.0;
};

// Traceless HS-orthonormal operator basis (generalized Gell-Mann order:
// symmetric pairs, antisymmetric pairs, diagonals).
std::vector<CMat> traceless_basis(Index dim);

// Expand the generator in {identity} + traceless_basis, split off the
// Hamiltonian part, Hermitize the Kossakowski block (residual above
// tol::gen throws), and eigendecompose into signed rates.
CanonicalGenerator canonical_decompose(const Superoperator& generator,
                                       double time = 0.0,
                                       double tol_gen = tol::gen);

// Reassemble the GKSL matrix from a canonical decomposition (for residual
// checks and round trips).
Superoperator canonical_reassemble(const CanonicalGenerator& cg, Index dim);

// Rates above are reported with unit-HS-norm jump operators. When the jump
// operator is proportional to a unitary (every Pauli case), the same channel
// written with the bare unitary carries rate hs_rate / dim.
double pauli_convention_rate(double hs_rate, Index dim);

}  // namespace nmsim
