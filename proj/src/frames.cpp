#include "nmsim/frames.hpp"

#include <algorithm>
#include <cmath>

#include "nmsim/json_util.hpp"

namespace nmsim {

namespace {

std::string gauge_label(Index g, Index m_total) {
  // power-of-two gauge spaces read naturally as syndrome bit strings
  if ((m_total & (m_total - 1)) == 0 && m_total > 1) {
    int bits = 0;
    while ((Index{1} << bits) < m_total) ++bits;
    std::string s(bits, '0');
    for (int b = 0; b < bits; ++b)
      if (g & (Index{1} << (bits - 1 - b))) s[b] = '1';
    return s;
  }
  return std::to_string(g);
}

// L_n(x) by the three-term recurrence.
double laguerre(Index n, double x) {
  double lm1 = 1.0, l = 1.0 - x;
  if (n == 0) return lm1;
  for (Index k = 1; k < n; ++k) {
    const double next =
        ((2.0 * k + 1.0 - x) * l - static_cast<double>(k) * lm1) / (k + 1.0);
    lm1 = l;
    l = next;
  }
  return l;
}

}  // namespace

CodeSpec CodeSpec::from_codewords(Index dim, std::vector<CVec> words, double t) {
  if (words.empty()) throw DimensionError("CodeSpec: no codewords");
  for (const auto& w : words)
    if (w.size() != dim) throw DimensionError("CodeSpec: codeword size mismatch");
  for (size_t i = 0; i < words.size(); ++i)
    for (size_t j = 0; j <= i; ++j) {
      const cplx ip = words[i].adjoint() * words[j];
      const cplx want = (i == j) ? cplx(1, 0) : cplx(0, 0);
      if (std::abs(ip - want) > t)
        throw InvariantViolation("CodeSpec: codewords not orthonormal");
    }
  CodeSpec code;
  code.dim = dim;
  code.codewords = std::move(words);
  code.projector = CMat::Zero(dim, dim);
  for (const auto& w : code.codewords) code.projector += w * w.adjoint();
  return code;
}

KlReport check_kl(const CodeSpec& code, const QuantumChannel& ch, double t) {
  if (ch.dim_in != code.dim || ch.dim_out != code.dim)
    throw DimensionError("check_kl: channel dimension does not match code");
  const Index k_dim = code.logical_dim();
  const size_t n_kraus = ch.kraus.size();
  KlReport rep;
  rep.d.resize(n_kraus, 0.0);
  for (size_t m = 0; m < n_kraus; ++m)
    for (size_t n = 0; n < n_kraus; ++n) {
      CMat b(k_dim, k_dim);
      for (Index i = 0; i < k_dim; ++i)
        for (Index j = 0; j < k_dim; ++j)
          b(i, j) = (code.codewords[i].adjoint() * ch.kraus[m].adjoint() *
                     ch.kraus[n] * code.codewords[j])
                        .value();
      if (m == n) {
        const double dm = b.trace().real() / static_cast<double>(k_dim);
        rep.d[m] = dm;
        rep.diagonal_residual = std::max(
            rep.diagonal_residual,
            (b - dm * CMat::Identity(k_dim, k_dim)).cwiseAbs().maxCoeff());
      } else {
        rep.offdiagonal_residual =
            std::max(rep.offdiagonal_residual, b.cwiseAbs().maxCoeff());
      }
    }
  rep.passes = rep.offdiagonal_residual <= t && rep.diagonal_residual <= t;
  return rep;
}

SubsystemFrame build_frame(const CodeSpec& code, const QuantumChannel& ch,
                           const std::optional<CMat>& clifford_hint,
                           double rank_tol) {
  const KlReport kl = check_kl(code, ch);
  if (!kl.passes)
    throw InvariantViolation("build_frame: Knill-Laflamme condition fails");
  const Index k_dim = code.logical_dim();
  const Index dim = code.dim;

  // normalized error-subspace bases U_m |k>_C = F_m |k>_C / sqrt(d_m)
  std::vector<std::vector<CVec>> bases;
  std::vector<int> retained;
  std::vector<int> dropped;
  for (size_t m = 0; m < ch.kraus.size(); ++m) {
    if (kl.d[m] <= rank_tol) {
      dropped.push_back(static_cast<int>(m));
      continue;
    }
    std::vector<CVec> basis;
    const double scale = 1.0 / std::sqrt(kl.d[m]);
    for (Index k = 0; k < k_dim; ++k)
      basis.push_back(scale * (ch.kraus[m] * code.codewords[k]));
    bases.push_back(std::move(basis));
    retained.push_back(static_cast<int>(m));
  }
  if (bases.empty())
    throw InvariantViolation("build_frame: every Kraus direction fell below the rank tolerance");

  SubsystemFrame frame;
  frame.dim_logical = k_dim;
  frame.dim_physical = dim;
  frame.dropped_kraus = std::move(dropped);
  frame.kraus_to_gauge.assign(ch.kraus.size(), -1);

  if (!clifford_hint) {
    const Index m_dim = static_cast<Index>(bases.size());
    frame.dim_gauge = m_dim;
    frame.isometry = CMat::Zero(k_dim * m_dim, dim);
    for (Index j = 0; j < m_dim; ++j) {
      for (Index k = 0; k < k_dim; ++k)
        frame.isometry.row(k * m_dim + j) = bases[j][k].adjoint();
      frame.logical_unitaries.push_back(CMat::Identity(k_dim, k_dim));
      frame.gauge_labels.push_back(std::to_string(retained[j]));
      frame.probabilities.push_back(kl.d[retained[j]]);
      frame.kraus_to_gauge[retained[j]] = static_cast<int>(j);
    }
    return frame;
  }

  const CMat& hint = *clifford_hint;
  if (hint.rows() != dim || hint.cols() != dim)
    throw DimensionError("build_frame: hint must be a square unitary on the physical space");
  if (dim % k_dim != 0)
    throw DimensionError("build_frame: physical dim not divisible by logical dim");
  const Index m_hint = dim / k_dim;

  // locate the gauge coordinate each error subspace occupies under the hint
  struct Located {
    Index gauge = 0;
    CMat q;          // induced logical unitary
    int kraus = 0;
    double d = 0.0;
  };
  std::vector<Located> found;
  for (size_t j = 0; j < bases.size(); ++j) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(m_hint);
    std::vector<CVec> mapped;
    for (Index k = 0; k < k_dim; ++k) {
      mapped.push_back(hint * bases[j][k]);
      for (Index l = 0; l < k_dim; ++l)
        for (Index g = 0; g < m_hint; ++g)
          mass(g) += std::norm(mapped.back()(l * m_hint + g));
    }
    Index g_star = 0;
    mass.maxCoeff(&g_star);
    const double leak = mass.sum() - mass(g_star);
    if (leak > 1e-9 * mass.sum())
      throw InvariantViolation("build_frame: hint does not factor an error subspace onto a single gauge coordinate");
    Located loc;
    loc.gauge = g_star;
    loc.kraus = retained[j];
    loc.d = kl.d[retained[j]];
    loc.q = CMat(k_dim, k_dim);
    for (Index l = 0; l < k_dim; ++l)
      for (Index k = 0; k < k_dim; ++k)
        loc.q(l, k) = mapped[k](l * m_hint + loc.gauge);
    if ((loc.q.adjoint() * loc.q - CMat::Identity(k_dim, k_dim))
            .cwiseAbs()
            .maxCoeff() > 1e-8)
      throw InvariantViolation("build_frame: induced logical operator is not unitary");
    for (const auto& other : found)
      if (other.gauge == loc.gauge)
        throw InvariantViolation("build_frame: two error subspaces share a gauge coordinate under the hint");
    found.push_back(std::move(loc));
  }
  std::sort(found.begin(), found.end(),
            [](const Located& a, const Located& b) { return a.gauge < b.gauge; });

  const Index m_dim = static_cast<Index>(found.size());
  frame.dim_gauge = m_dim;
  frame.isometry = CMat::Zero(k_dim * m_dim, dim);
  for (Index j = 0; j < m_dim; ++j) {
    for (Index k = 0; k < k_dim; ++k)
      frame.isometry.row(k * m_dim + j) = hint.row(k * m_hint + found[j].gauge);
    frame.logical_unitaries.push_back(found[j].q);
    frame.gauge_labels.push_back(gauge_label(found[j].gauge, m_hint));
    frame.probabilities.push_back(found[j].d);
    frame.kraus_to_gauge[found[j].kraus] = static_cast<int>(j);
  }
  return frame;
}

SubsystemFrame three_qubit_frame() {
  // CNOT(1,2) CNOT(2,3) sends |b1 b2 b3> to |b1, b1^b2, b2^b3>; the first
  // qubit carries the logical state and the last two the syndrome pair
  // (Z1Z2, Z2Z3).
  SubsystemFrame frame;
  frame.dim_logical = 2;
  frame.dim_gauge = 4;
  frame.dim_physical = 8;
  frame.isometry = CMat::Zero(8, 8);
  for (Index b = 0; b < 8; ++b) {
    const Index b1 = (b >> 2) & 1, b2 = (b >> 1) & 1, b3 = b & 1;
    const Index target = (b1 << 2) | ((b1 ^ b2) << 1) | (b2 ^ b3);
    frame.isometry(target, b) = 1.0;
  }
  const CMat id = CMat::Identity(2, 2);
  frame.logical_unitaries = {id, id, pauli_x(), id};
  frame.gauge_labels = {"00", "01", "10", "11"};
  return frame;
}

SubsystemFrame teleportation_frame() {
  SubsystemFrame frame;
  frame.layout = FrameLayout::GaugeFirst;
  frame.dim_logical = 2;
  frame.dim_gauge = 4;
  frame.dim_physical = 8;
  // rows are the Bell vectors (X^m1 Z^m2 on the second qubit)|Phi00>
  const double s = 1.0 / std::sqrt(2.0);
  CMat bells(4, 4);
  bells.setZero();
  bells.row(0) << s, 0, 0, s;    // Phi00
  bells.row(1) << s, 0, 0, -s;   // Phi01
  bells.row(2) << 0, s, s, 0;    // Phi10
  bells.row(3) << 0, s, -s, 0;   // Phi11
  frame.isometry = bells;
  frame.logical_unitaries = {CMat::Identity(2, 2), pauli_z(), pauli_x(),
                             pauli_x() * pauli_z()};
  frame.gauge_labels = {"00", "01", "10", "11"};
  return frame;
}

SubsystemFrame squeezed_cat_frame(double alpha, double r, Index n_trunc,
                                  Index max_gauge, double norm_guard) {
  if (!(alpha > 0.0) || r < 0.0 || n_trunc < 4)
    throw DimensionError("squeezed_cat_frame: bad parameters");
  // Truncated displacement and squeeze matrices are exactly unitary (they
  // exponentiate truncated anti-hermitian generators), so leakage past the
  // cutoff is only visible from a padded space.
  const Index n_big = n_trunc + 150;
  const CMat dp = displacement(alpha, n_big);
  const CMat dm = dp.adjoint();  // real displacement, inverse equals adjoint
  const CMat sq = squeeze(r, n_big);

  std::vector<CVec> kept;  // order: (n=0 +), (n=0 -), (n=1 +), ...
  const Index level_cap =
      (max_gauge > 0) ? std::min(max_gauge, n_trunc / 2) : n_trunc / 2;
  for (Index n = 0; n < level_cap; ++n) {
    CVec fock = CVec::Zero(n_big);
    fock(n) = 1.0;
    const double cross =
        std::exp(-2.0 * alpha * alpha) * laguerre(n, 4.0 * alpha * alpha);
    bool level_ok = true;
    std::vector<CVec> pair;
    for (int branch = 0; branch < 2 && level_ok; ++branch) {
      const double sign = (branch == 0) ? 1.0 : -1.0;
      const double parity = (n % 2 == 0) ? 1.0 : -1.0;
      const CVec raw = dp * fock + sign * parity * (dm * fock);
      const double exact = 2.0 * (1.0 + sign * parity * cross);
      const CVec full = sq * raw;
      const double total = full.squaredNorm();
      if (std::abs(exact - total) / exact > std::max(norm_guard, 1e-6))
        throw NumericalError("squeezed_cat_frame: internal padding insufficient for the requested parameters");
      CVec w = full.head(n_trunc);
      const double deficit = (total - w.squaredNorm()) / total;
      if (deficit >= norm_guard) {
        level_ok = false;
        break;
      }
      pair.push_back(std::move(w));
    }
    if (!level_ok) {
      if (n == 0)
        throw NumericalError("squeezed_cat_frame: truncation insufficient for the requested parameters");
      break;
    }
    bool exhausted = false;
    std::vector<CVec> accepted;
    for (auto& w : pair) {
      const double pre = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& prev : kept) w -= prev.dot(w) * prev;
        for (const auto& prev : accepted) w -= prev.dot(w) * prev;
      }
      if (w.norm() < 1e-8 * pre) {
        exhausted = true;  // remaining levels no longer add directions
        break;
      }
      w /= w.norm();
      accepted.push_back(std::move(w));
    }
    if (exhausted) {
      if (n == 0)
        throw NumericalError("squeezed_cat_frame: basis vectors linearly dependent at the first level");
      break;
    }
    for (auto& w : accepted) kept.push_back(std::move(w));
  }

  const Index m_dim = static_cast<Index>(kept.size()) / 2;
  SubsystemFrame frame;
  frame.dim_logical = 2;
  frame.dim_gauge = m_dim;
  frame.dim_physical = n_trunc;
  frame.isometry = CMat::Zero(2 * m_dim, n_trunc);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index n = 0; n < m_dim; ++n) {
    const CVec& wp = kept[2 * n];
    const CVec& wm = kept[2 * n + 1];
    frame.isometry.row(0 * m_dim + n) = (inv_sqrt2 * (wp + wm)).adjoint();
    frame.isometry.row(1 * m_dim + n) = (inv_sqrt2 * (wp - wm)).adjoint();
    frame.gauge_labels.push_back(std::to_string(n));
  }
  return frame;
}

CMat logical_state(const CMat& rho, const SubsystemFrame& frame,
                   double leak_tol) {
  if (frame.layout == FrameLayout::GaugeFirst) {
    if (rho.rows() != frame.dim_physical)
      throw DimensionError("logical_state: state dimension mismatch");
    const CMat u =
        tensor_product(frame.isometry, CMat::Identity(frame.dim_logical,
                                                       frame.dim_logical));
    return partial_trace(u * rho * u.adjoint(),
                         {frame.dim_gauge, frame.dim_logical}, {1});
  }
  if (rho.rows() != frame.dim_physical)
    throw DimensionError("logical_state: state dimension mismatch");
  const CMat projected = frame.isometry * rho * frame.isometry.adjoint();
  const double leak = rho.trace().real() - projected.trace().real();
  if (std::abs(leak) > std::max(leak_tol, leak_tol * std::abs(rho.trace())))
    throw InvariantViolation("logical_state: support leaks outside the frame domain");
  return partial_trace(projected, {frame.dim_logical, frame.dim_gauge}, {0});
}

double frame_relation_residual(const SubsystemFrame& frame,
                               const CodeSpec& code, const QuantumChannel& ch) {
  if (frame.layout != FrameLayout::LogicalGauge)
    throw DimensionError("frame_relation_residual: code-frame layout required");
  if (frame.kraus_to_gauge.size() != ch.kraus.size())
    throw DimensionError("frame_relation_residual: frame was not built from this channel");
  double worst = 0.0;
  for (size_t m = 0; m < ch.kraus.size(); ++m) {
    const int g = frame.kraus_to_gauge[m];
    if (g < 0) continue;
    for (Index k = 0; k < code.logical_dim(); ++k) {
      const CVec lhs = frame.isometry * (ch.kraus[m] * code.codewords[k]);
      CVec logical = CVec::Zero(frame.dim_logical);
      logical(k) = 1.0;
      CVec gauge = CVec::Zero(frame.dim_gauge);
      gauge(g) = 1.0;
      const CVec rhs = std::sqrt(frame.probabilities[g]) *
                       tensor_product(CVec(frame.logical_unitaries[g] * logical),
                                      gauge);
      worst = std::max(worst, (lhs - rhs).norm());
    }
  }
  return worst;
}

nlohmann::json frame_to_json(const SubsystemFrame& frame) {
  nlohmann::json j;
  j["dim_logical"] = frame.dim_logical;
  j["dim_gauge"] = frame.dim_gauge;
  j["dim_physical"] = frame.dim_physical;
  j["layout"] =
      frame.layout == FrameLayout::LogicalGauge ? "logical_gauge" : "gauge_first";
  j["isometry"] = mat_to_json(frame.isometry);
  j["logical_unitaries"] = nlohmann::json::array();
  for (const auto& q : frame.logical_unitaries)
    j["logical_unitaries"].push_back(mat_to_json(q));
  j["probabilities"] = frame.probabilities;
  j["gauge_labels"] = frame.gauge_labels;
  j["dropped_kraus"] = frame.dropped_kraus;
  j["kraus_to_gauge"] = frame.kraus_to_gauge;
  return j;
}

SubsystemFrame frame_from_json(const nlohmann::json& j) {
  SubsystemFrame frame;
  frame.dim_logical = j.at("dim_logical").get<Index>();
  frame.dim_gauge = j.at("dim_gauge").get<Index>();
  frame.dim_physical = j.at("dim_physical").get<Index>();
  const std::string layout = j.at("layout").get<std::string>();
  if (layout == "logical_gauge")
    frame.layout = FrameLayout::LogicalGauge;
  else if (layout == "gauge_first")
    frame.layout = FrameLayout::GaugeFirst;
  else
    throw ConfigError("frame json: unknown layout '" + layout + "'");
  frame.isometry = mat_from_json(j.at("isometry"));
  for (const auto& q : j.at("logical_unitaries"))
    frame.logical_unitaries.push_back(mat_from_json(q));
  frame.probabilities = j.at("probabilities").get<std::vector<double>>();
  frame.gauge_labels = j.at("gauge_labels").get<std::vector<std::string>>();
  frame.dropped_kraus = j.at("dropped_kraus").get<std::vector<int>>();
  frame.kraus_to_gauge = j.at("kraus_to_gauge").get<std::vector<int>>();
  return frame;
}

CodeSpec three_qubit_code() {
  CVec zero = CVec::Zero(8), one = CVec::Zero(8);
  zero(0) = 1.0;  // |000>
  one(7) = 1.0;   // |111>
  return CodeSpec::from_codewords(8, {zero, one});
}

QuantumChannel three_qubit_single_flip_channel(double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw InvariantViolation("three_qubit_single_flip_channel: p outside [0, 1)");
  const double w0 = std::pow(1.0 - p, 3);
  const double w1 = p * (1.0 - p) * (1.0 - p);
  const double z = w0 + 3.0 * w1;
  const CMat id2 = CMat::Identity(2, 2);
  const CMat x = pauli_x();
  auto kron3 = [&](const CMat& a, const CMat& b, const CMat& c) {
    return tensor_product(tensor_product(a, b), c);
  };
  std::vector<CMat> ops;
  ops.push_back(std::sqrt(w0 / z) * kron3(id2, id2, id2));
  ops.push_back(std::sqrt(w1 / z) * kron3(x, id2, id2));
  ops.push_back(std::sqrt(w1 / z) * kron3(id2, x, id2));
  ops.push_back(std::sqrt(w1 / z) * kron3(id2, id2, x));
  return QuantumChannel::from_kraus(std::move(ops));
}

}  // namespace nmsim
