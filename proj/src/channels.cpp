#include "nmsim/channels.hpp"

#include <cmath>

namespace nmsim {

QuantumChannel QuantumChannel::from_kraus(std::vector<CMat> ops) {
  if (ops.empty()) throw DimensionError("QuantumChannel: empty Kraus list");
  const Index rows = ops.front().rows();
  const Index cols = ops.front().cols();
  for (const auto& k : ops)
    if (k.rows() != rows || k.cols() != cols)
      throw DimensionError("QuantumChannel: inconsistent Kraus shapes");
  QuantumChannel ch;
  ch.kraus = std::move(ops);
  ch.dim_in = cols;
  ch.dim_out = rows;
  return ch;
}

CMat QuantumChannel::apply(const CMat& rho) const {
  if (rho.rows() != dim_in || rho.cols() != dim_in)
    throw DimensionError("QuantumChannel::apply: state dimension mismatch");
  CMat out = CMat::Zero(dim_out, dim_out);
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

double QuantumChannel::tp_defect() const {
  CMat s = CMat::Zero(dim_in, dim_in);
  for (const auto& k : kraus) s += k.adjoint() * k;
  return (s - CMat::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
}

Superoperator Superoperator::identity(Index dim) {
  return Superoperator{CMat::Identity(dim * dim, dim * dim), dim, dim};
}

CMat Superoperator::apply(const CMat& rho) const {
  if (rho.rows() != dim_in || rho.cols() != dim_in)
    throw DimensionError("Superoperator::apply: state dimension mismatch");
  return unvec(m * vec(rho), dim_out, dim_out);
}

Superoperator Superoperator::compose_after(const Superoperator& first) const {
  if (dim_in != first.dim_out)
    throw DimensionError("Superoperator::compose_after: dimension mismatch");
  return Superoperator{m * first.m, first.dim_in, dim_out};
}

double Superoperator::tp_defect() const {
  // trace preservation: vec(I_out)^dag S = vec(I_in)^dag
  const CVec ti = vec(CMat::Identity(dim_out, dim_out));
  const CVec lhs = m.adjoint() * ti;
  const CVec rhs = vec(CMat::Identity(dim_in, dim_in));
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double Superoperator::hermiticity_preservation_defect() const {
  // S preserves hermiticity iff applying it to hermitian basis elements
  // yields hermitian results; equivalently S = conj-reshuffled S.
  double worst = 0.0;
  for (Index i = 0; i < dim_in; ++i)
    for (Index j = i; j < dim_in; ++j) {
      CMat e = CMat::Zero(dim_in, dim_in);
      if (i == j) {
        e(i, j) = 1.0;
        worst = std::max(worst, hermiticity_defect(apply(e)));
      } else {
        e(i, j) = 1.0;
        e(j, i) = 1.0;
        worst = std::max(worst, hermiticity_defect(apply(e)));
        e(i, j) = cplx(0.0, -1.0);
        e(j, i) = cplx(0.0, 1.0);
        worst = std::max(worst, hermiticity_defect(apply(e)));
      }
    }
  return worst;
}

Superoperator kraus_to_superoperator(const QuantumChannel& ch) {
  CMat s = CMat::Zero(ch.dim_out * ch.dim_out, ch.dim_in * ch.dim_in);
  for (const auto& k : ch.kraus) s += tensor_product(k.conjugate(), k);
  return Superoperator{std::move(s), ch.dim_in, ch.dim_out};
}

ChoiMatrix superoperator_to_choi(const Superoperator& s) {
  const Index di = s.dim_in, dout = s.dim_out;
  CMat c = CMat::Zero(dout * di, dout * di);
  // C = (1/di) sum_ij E(|i><j|) (x) |i><j|, row index (k, i), col index (l, j)
  for (Index i = 0; i < di; ++i)
    for (Index j = 0; j < di; ++j) {
      CMat e = CMat::Zero(di, di);
      e(i, j) = 1.0;
      const CMat blk = s.apply(e);
      for (Index k = 0; k < dout; ++k)
        for (Index l = 0; l < dout; ++l)
          c(k * di + i, l * di + j) = blk(k, l) / static_cast<double>(di);
    }
  return ChoiMatrix{std::move(c), di, dout};
}

Superoperator choi_to_superoperator(const ChoiMatrix& c) {
  const Index di = c.dim_in, dout = c.dim_out;
  CMat s(dout * dout, di * di);
  for (Index i = 0; i < di; ++i)
    for (Index j = 0; j < di; ++j)
      for (Index k = 0; k < dout; ++k)
        for (Index l = 0; l < dout; ++l)
          s(l * dout + k, j * di + i) =
              c.m(k * di + i, l * di + j) * static_cast<double>(di);
  return Superoperator{std::move(s), di, dout};
}

ChoiMatrix kraus_to_choi(const QuantumChannel& ch) {
  return superoperator_to_choi(kraus_to_superoperator(ch));
}

QuantumChannel choi_to_kraus(const ChoiMatrix& c, double rank_cutoff) {
  const auto rep = cp_check(c);
  if (!rep.is_cp)
    throw InvariantViolation("choi_to_kraus: Choi matrix is not CP within tolerance");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (c.m + c.m.adjoint()));
  const Index di = c.dim_in, dout = c.dim_out;
  std::vector<CMat> ops;
  for (Index idx = 0; idx < es.eigenvalues().size(); ++idx) {
    const double lam = es.eigenvalues()(idx);
    if (lam <= rank_cutoff) continue;
    const CVec u = es.eigenvectors().col(idx);
    CMat k(dout, di);
    for (Index r = 0; r < dout; ++r)
      for (Index i = 0; i < di; ++i)
        k(r, i) = std::sqrt(lam * static_cast<double>(di)) * u(r * di + i);
    ops.push_back(std::move(k));
  }
  if (ops.empty()) ops.push_back(CMat::Zero(dout, di));
  return QuantumChannel::from_kraus(std::move(ops));
}

QuantumChannel superoperator_to_kraus(const Superoperator& s, double rank_cutoff) {
  return choi_to_kraus(superoperator_to_choi(s), rank_cutoff);
}

CpReport cp_check(const ChoiMatrix& c) {
  if (hermiticity_defect(c.m) > tol::herm)
    throw InvariantViolation("cp_check: Choi matrix is not hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (c.m + c.m.adjoint()),
                                         Eigen::EigenvaluesOnly);
  CpReport rep;
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.is_cp =
      rep.min_eigenvalue >= -tol::psd_scale * static_cast<double>(c.m.rows());
  return rep;
}

CMat pauli_x() {
  CMat x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

CMat pauli_y() {
  CMat y(2, 2);
  y << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
  return y;
}

CMat pauli_z() {
  CMat z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

namespace {
void require_weight(double w, const char* who) {
  if (!(w >= 0.0 && w <= 1.0))
    throw InvariantViolation(std::string(who) + ": weight outside [0, 1]");
}
}  // namespace

QuantumChannel bit_flip_channel(double weight) {
  require_weight(weight, "bit_flip_channel");
  std::vector<CMat> ops;
  ops.push_back(std::sqrt(1.0 - weight) * CMat::Identity(2, 2));
  ops.push_back(std::sqrt(weight) * pauli_x());
  return QuantumChannel::from_kraus(std::move(ops));
}

QuantumChannel phase_flip_channel(double weight) {
  require_weight(weight, "phase_flip_channel");
  std::vector<CMat> ops;
  ops.push_back(std::sqrt(1.0 - weight) * CMat::Identity(2, 2));
  ops.push_back(std::sqrt(weight) * pauli_z());
  return QuantumChannel::from_kraus(std::move(ops));
}

QuantumChannel depolarizing_channel(double weight) {
  require_weight(weight, "depolarizing_channel");
  std::vector<CMat> ops;
  ops.push_back(std::sqrt(1.0 - weight) * CMat::Identity(2, 2));
  ops.push_back(std::sqrt(weight / 3.0) * pauli_x());
  ops.push_back(std::sqrt(weight / 3.0) * pauli_y());
  ops.push_back(std::sqrt(weight / 3.0) * pauli_z());
  return QuantumChannel::from_kraus(std::move(ops));
}

Superoperator pauli_mix_superoperator(double wi, double wx, double wy,
                                      double wz) {
  // rho -> wi rho + wx X rho X + wy Y rho Y + wz Z rho Z for any real weights;
  // not necessarily CP, useful for formal inverses and intermediate maps.
  const CMat x = pauli_x(), y = pauli_y(), z = pauli_z();
  CMat s = wi * CMat::Identity(4, 4);
  s += wx * tensor_product(x.conjugate(), x);
  s += wy * tensor_product(y.conjugate(), y);
  s += wz * tensor_product(z.conjugate(), z);
  return Superoperator{std::move(s), 2, 2};
}

}  // namespace nmsim
