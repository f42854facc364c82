#pragma once

// Dense complex linear algebra used across the library: tensor products,
// partial traces, trace norms, matrix functions, and a validated density
// matrix wrapper. Conventions: column-stacking vectorization throughout.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nmsim/errors.hpp"

namespace nmsim {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double herm = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double tp = 1e-9;
inline constexpr double psd_scale = 1e-9;     // scaled by dimension
inline constexpr double pinv_cutoff = 1e-10;  // relative to largest singular value
inline constexpr double cond_cap = 1e8;
inline constexpr double gen = 1e-8;  // generator symmetrization / reassembly
}  // namespace tol

CMat tensor_product(const CMat& a, const CMat& b);
CVec tensor_product(const CVec& a, const CVec& b);

// Trace out every subsystem not listed in `keep`. `dims` are the subsystem
// dimensions in tensor order; `keep` is a strictly increasing list of
// subsystem indices. The result is ordered by the kept subsystems.
CMat partial_trace(const CMat& m, const std::vector<Index>& dims,
                   const std::vector<int>& keep);

double trace_norm(const CMat& m);
double trace_distance(const CMat& a, const CMat& b);

CMat matrix_exponential(const CMat& m);

// Unitary factor of the polar decomposition m = U P, via SVD.
CMat polar_unitary(const CMat& m);

// Moore-Penrose pseudo-inverse with singular values below
// cutoff_rel * sigma_max treated as zero.
CMat pseudo_inverse(const CMat& m, double cutoff_rel = tol::pinv_cutoff);

// sigma_max / sigma_min over all singular values (inf if rank deficient).
double condition_number(const CMat& m);

double hermiticity_defect(const CMat& m);

CVec vec(const CMat& m);
CMat unvec(const CVec& v, Index rows, Index cols);

class DensityMatrix {
 public:
  // Validates hermiticity, unit trace, and positivity within tolerances.
  explicit DensityMatrix(CMat m);
  static DensityMatrix pure(const CVec& psi);
  static DensityMatrix maximally_mixed(Index dim);

  const CMat& mat() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  CMat m_;
};

double fidelity_with_pure(const CMat& rho, const CVec& psi);

// Truncated Fock-space operators (dimension n, levels 0..n-1).
CMat annihilation(Index n);
CMat displacement(cplx alpha, Index n);  // exp(alpha a+ - conj(alpha) a)
CMat squeeze(cplx z, Index n);           // exp((conj(z) a a - z a+ a+)/2)
CVec coherent(cplx alpha, Index n);

}  // namespace nmsim
