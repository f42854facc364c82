#include "nmsim/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numeric>

namespace nmsim {

CMat tensor_product(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec tensor_product(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CMat partial_trace(const CMat& m, const std::vector<Index>& dims,
                   const std::vector<int>& keep) {
  const Index total =
      std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
  if (m.rows() != total || m.cols() != total)
    throw DimensionError("partial_trace: matrix does not match subsystem dims");
  for (size_t k = 0; k + 1 < keep.size(); ++k)
    if (keep[k] >= keep[k + 1])
      throw DimensionError("partial_trace: keep list must be strictly increasing");
  for (int k : keep)
    if (k < 0 || static_cast<size_t>(k) >= dims.size())
      throw DimensionError("partial_trace: keep index out of range");

  // Decompose each full index into (kept part, traced part).
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) kept[k] = true;
  Index dim_keep = 1;
  for (int k : keep) dim_keep *= dims[k];

  std::vector<Index> keep_part(total), trace_part(total);
  for (Index idx = 0; idx < total; ++idx) {
    Index rest = idx, kp = 0, tp = 0;
    for (size_t s = 0; s < dims.size(); ++s) {
      // tensor order: leftmost subsystem is the most significant digit
      Index stride = 1;
      for (size_t r = s + 1; r < dims.size(); ++r) stride *= dims[r];
      const Index digit = rest / stride;
      rest %= stride;
      if (kept[s])
        kp = kp * dims[s] + digit;
      else
        tp = tp * dims[s] + digit;
    }
    keep_part[idx] = kp;
    trace_part[idx] = tp;
  }

  CMat out = CMat::Zero(dim_keep, dim_keep);
  for (Index i = 0; i < total; ++i)
    for (Index j = 0; j < total; ++j)
      if (trace_part[i] == trace_part[j])
        out(keep_part[i], keep_part[j]) += m(i, j);
  return out;
}

double trace_norm(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("trace_distance: shape mismatch");
  return 0.5 * trace_norm(a - b);
}

CMat matrix_exponential(const CMat& m) {
  if (m.rows() != m.cols())
    throw DimensionError("matrix_exponential: matrix must be square");
  CMat out = m.exp();
  if (!out.allFinite())
    throw NumericalError("matrix_exponential: result is not finite");
  return out;
}

CMat polar_unitary(const CMat& m) {
  if (m.rows() != m.cols())
    throw DimensionError("polar_unitary: matrix must be square");
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMat pseudo_inverse(const CMat& m, double cutoff_rel) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return CMat::Zero(m.cols(), m.rows());
  const double cutoff = cutoff_rel * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

double condition_number(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

double hermiticity_defect(const CMat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CVec vec(const CMat& m) {
  return Eigen::Map<const CVec>(m.data(), m.size());
}

CMat unvec(const CVec& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

DensityMatrix::DensityMatrix(CMat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw DimensionError("DensityMatrix: matrix must be square");
  if (hermiticity_defect(m_) > tol::herm)
    throw InvariantViolation("DensityMatrix: not hermitian within tolerance");
  if (std::abs(m_.trace() - cplx(1.0, 0.0)) > tol::trace)
    throw InvariantViolation("DensityMatrix: trace differs from one");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m_ + m_.adjoint()),
                                         Eigen::EigenvaluesOnly);
  const double floor = -tol::psd_scale * static_cast<double>(m_.rows());
  if (es.eigenvalues().minCoeff() < floor)
    throw InvariantViolation("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix DensityMatrix::pure(const CVec& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0) throw InvariantViolation("DensityMatrix: zero state vector");
  return DensityMatrix(psi * psi.adjoint() / n2);
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(CMat::Identity(dim, dim) / static_cast<double>(dim));
}

double fidelity_with_pure(const CMat& rho, const CVec& psi) {
  return (psi.adjoint() * rho * psi).value().real() / psi.squaredNorm();
}

CMat annihilation(Index n) {
  CMat a = CMat::Zero(n, n);
  for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

CMat displacement(cplx alpha, Index n) {
  const CMat a = annihilation(n);
  return matrix_exponential(alpha * a.adjoint() - std::conj(alpha) * a);
}

CMat squeeze(cplx z, Index n) {
  const CMat a = annihilation(n);
  return matrix_exponential(0.5 * (std::conj(z) * a * a -
                                   z * a.adjoint() * a.adjoint()));
}

CVec coherent(cplx alpha, Index n) {
  CVec vac = CVec::Zero(n);
  vac(0) = 1.0;
  return displacement(alpha, n) * vac;
}

}  // namespace nmsim
