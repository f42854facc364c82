#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nmsim/frames.hpp"
#include "nmsim/json_util.hpp"
#include "test_util.hpp"

using namespace nmsim;

namespace {

CMat kron3(const CMat& a, const CMat& b, const CMat& c) {
  return tensor_product(tensor_product(a, b), c);
}

CVec basis_vec(Index dim, Index i) {
  CVec v = CVec::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("recoverability check accepts single flips on the repetition code") {
  const CodeSpec code = three_qubit_code();
  const QuantumChannel ch = three_qubit_single_flip_channel(0.1);
  const KlReport rep = check_kl(code, ch);
  CHECK(rep.passes);
  CHECK(rep.offdiagonal_residual < 1e-12);
  CHECK(rep.diagonal_residual < 1e-12);
  const double w0 = std::pow(0.9, 3), w1 = 0.1 * 0.9 * 0.9;
  const double z = w0 + 3 * w1;
  REQUIRE(rep.d.size() == 4);
  CHECK(rep.d[0] == doctest::Approx(w0 / z).epsilon(1e-12));
  for (int m = 1; m < 4; ++m)
    CHECK(rep.d[m] == doctest::Approx(w1 / z).epsilon(1e-12));
}

TEST_CASE("recoverability check rejects a double flip mixed with a single") {
  const CodeSpec code = three_qubit_code();
  const CMat id2 = CMat::Identity(2, 2);
  const CMat x = pauli_x();
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<CMat> ops = {s * kron3(x, x, id2), s * kron3(id2, id2, x)};
  const QuantumChannel ch = QuantumChannel::from_kraus(std::move(ops));
  const KlReport rep = check_kl(code, ch);
  CHECK_FALSE(rep.passes);
  CHECK(rep.offdiagonal_residual > 0.4);
}

TEST_CASE("decoding permutation routes every basis state to its syndrome") {
  const SubsystemFrame frame = three_qubit_frame();
  REQUIRE(frame.dim_logical == 2);
  REQUIRE(frame.dim_gauge == 4);
  const CMat& v = frame.isometry;
  CHECK((v * v.adjoint() - CMat::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  // rows indexed logical*4 + gauge; expected images of |b1 b2 b3>
  const struct {
    Index in;
    Index logical;
    Index gauge;
  } table[] = {
      {0b000, 0, 0b00}, {0b001, 0, 0b01}, {0b010, 0, 0b11}, {0b011, 0, 0b10},
      {0b100, 1, 0b10}, {0b101, 1, 0b11}, {0b110, 1, 0b01}, {0b111, 1, 0b00},
  };
  for (const auto& row : table) {
    const CVec out = v * basis_vec(8, row.in);
    for (Index i = 0; i < 8; ++i) {
      const double want = (i == row.logical * 4 + row.gauge) ? 1.0 : 0.0;
      CHECK(out(i) == cplx(want, 0.0));
    }
  }
}

TEST_CASE("decoding circuit conjugates single flips to flip products") {
  const CMat v = three_qubit_frame().isometry;
  const CMat id2 = CMat::Identity(2, 2);
  const CMat x = pauli_x();
  const CMat x1 = v * kron3(x, id2, id2) * v.adjoint();
  const CMat x2 = v * kron3(id2, x, id2) * v.adjoint();
  const CMat x3 = v * kron3(id2, id2, x) * v.adjoint();
  CHECK((x1 - kron3(x, x, id2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((x2 - kron3(id2, x, x)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((x3 - kron3(id2, id2, x)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hinted frame for the repetition code reproduces the syndrome map") {
  const CodeSpec code = three_qubit_code();
  const QuantumChannel ch = three_qubit_single_flip_channel(0.1);
  const CMat hint = three_qubit_frame().isometry;
  const SubsystemFrame frame = build_frame(code, ch, hint);
  REQUIRE(frame.dim_gauge == 4);
  CHECK((frame.isometry - hint).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(frame.gauge_labels.size() == 4);
  CHECK(frame.gauge_labels[0] == "00");
  CHECK(frame.gauge_labels[1] == "01");
  CHECK(frame.gauge_labels[2] == "10");
  CHECK(frame.gauge_labels[3] == "11");
  const CMat id2 = CMat::Identity(2, 2);
  CHECK((frame.logical_unitaries[0] - id2).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((frame.logical_unitaries[1] - id2).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((frame.logical_unitaries[2] - pauli_x()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((frame.logical_unitaries[3] - id2).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(frame.kraus_to_gauge.size() == 4);
  CHECK(frame.kraus_to_gauge[0] == 0);  // no error -> trivial syndrome
  CHECK(frame.kraus_to_gauge[1] == 2);  // flip on qubit 1 -> "10"
  CHECK(frame.kraus_to_gauge[2] == 3);  // flip on qubit 2 -> "11"
  CHECK(frame.kraus_to_gauge[3] == 1);  // flip on qubit 3 -> "01"
  CHECK(frame_relation_residual(frame, code, ch) < 1e-10);
}

TEST_CASE("raw frame carries identity logical operators and exact relation") {
  const CodeSpec code = three_qubit_code();
  const QuantumChannel ch = three_qubit_single_flip_channel(0.07);
  const SubsystemFrame frame = build_frame(code, ch);
  REQUIRE(frame.dim_gauge == 4);
  for (const auto& q : frame.logical_unitaries)
    CHECK((q - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((frame.isometry * frame.isometry.adjoint() - CMat::Identity(8, 8))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(frame_relation_residual(frame, code, ch) < 1e-10);
  // error subspaces are mutually orthogonal
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      if (m == n) continue;
      for (Index k = 0; k < 2; ++k)
        for (Index l = 0; l < 2; ++l) {
          const CVec lhs = ch.kraus[m] * code.codewords[k];
          const CVec rhs = ch.kraus[n] * code.codewords[l];
          CHECK(std::abs(lhs.dot(rhs)) < 1e-10);
        }
    }
}

TEST_CASE("frame build drops zero-weight errors and flags leakage") {
  const CodeSpec code = three_qubit_code();
  const QuantumChannel ch = three_qubit_single_flip_channel(0.0);
  const SubsystemFrame frame = build_frame(code, ch);
  CHECK(frame.dim_gauge == 1);
  CHECK(frame.dropped_kraus == std::vector<int>{1, 2, 3});
  CHECK(frame.kraus_to_gauge == std::vector<int>({0, -1, -1, -1}));
  CMat outside = CMat::Zero(8, 8);
  outside(2, 2) = 1.0;  // |010> is not in the retained domain
  CHECK_THROWS_AS(logical_state(outside, frame), InvariantViolation);
}

TEST_CASE("frame build rejects unrecoverable channels") {
  const CodeSpec code = three_qubit_code();
  const CMat id2 = CMat::Identity(2, 2);
  const CMat x = pauli_x();
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<CMat> ops = {s * kron3(x, x, id2), s * kron3(id2, id2, x)};
  const QuantumChannel ch = QuantumChannel::from_kraus(std::move(ops));
  CHECK_THROWS_AS(build_frame(code, ch), InvariantViolation);
}

TEST_CASE("corrupted logical state is the syndrome-weighted twirl") {
  std::mt19937 rng(11);
  const CodeSpec code = three_qubit_code();
  const QuantumChannel ch = three_qubit_single_flip_channel(0.1);
  const CMat hint = three_qubit_frame().isometry;
  const SubsystemFrame frame = build_frame(code, ch, hint);
  const CVec psi = testutil::random_pure(2, rng);
  const CVec enc = psi(0) * code.codewords[0] + psi(1) * code.codewords[1];
  CMat rho = CMat::Zero(8, 8);
  for (const auto& f : ch.kraus) {
    const CVec branch = f * enc;
    rho += branch * branch.adjoint();
  }
  const CMat got = logical_state(rho, frame);
  CMat want = CMat::Zero(2, 2);
  for (Index g = 0; g < 4; ++g) {
    const CVec q_psi = frame.logical_unitaries[g] * psi;
    want += frame.probabilities[g] * (q_psi * q_psi.adjoint());
  }
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bell rotation turns a product input into syndrome-tagged branches") {
  std::mt19937 rng(23);
  const SubsystemFrame frame = teleportation_frame();
  REQUIRE(frame.layout == FrameLayout::GaugeFirst);
  const CMat& v = frame.isometry;
  CHECK((v * v.adjoint() - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  const CVec psi = testutil::random_pure(2, rng);
  CVec pair = CVec::Zero(4);
  pair(0) = pair(3) = 1.0 / std::sqrt(2.0);
  const CVec input = tensor_product(psi, pair);
  const CVec rotated =
      tensor_product(v, CMat::Identity(2, 2)) * input;
  CVec expect = CVec::Zero(8);
  for (Index m = 0; m < 4; ++m) {
    const CVec corr = frame.logical_unitaries[m] * psi;
    expect += 0.5 * tensor_product(basis_vec(4, m), corr);
  }
  CHECK((rotated - expect).cwiseAbs().maxCoeff() < 1e-13);

  const CMat rho = input * input.adjoint();
  const CMat rotated_rho =
      tensor_product(v, CMat::Identity(2, 2)) * rho *
      tensor_product(v, CMat::Identity(2, 2)).adjoint();
  const CMat alice = partial_trace(rotated_rho, {4, 2}, {0});
  for (Index m = 0; m < 4; ++m)
    CHECK(std::abs(alice(m, m) - cplx(0.25, 0.0)) < 1e-13);
  const CMat logical = logical_state(rho, frame);
  CHECK((logical - 0.5 * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("unsqueezed cat words decode onto the plus and minus axes") {
  const double alpha = 1.2;
  const Index n = 80;
  const SubsystemFrame frame = squeezed_cat_frame(alpha, 0.0, n);
  REQUIRE(frame.dim_gauge >= 2);
  const Index m = frame.dim_gauge;
  const CVec plus_cat_raw = coherent(alpha, n) + coherent(-alpha, n);
  const CVec minus_cat_raw = CVec(coherent(alpha, n) - coherent(-alpha, n));
  const CVec plus_cat = plus_cat_raw / plus_cat_raw.norm();
  const CVec minus_cat = minus_cat_raw / minus_cat_raw.norm();

  const CVec up = frame.isometry * plus_cat;
  const CVec um = frame.isometry * minus_cat;
  CVec want_p = CVec::Zero(2 * m), want_m = CVec::Zero(2 * m);
  const double s = 1.0 / std::sqrt(2.0);
  want_p(0 * m + 0) = s;
  want_p(1 * m + 0) = s;
  want_m(0 * m + 0) = s;
  want_m(1 * m + 0) = -s;
  CHECK((up - want_p).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((um - want_m).cwiseAbs().maxCoeff() < 1e-10);

  CHECK((frame.isometry * frame.isometry.adjoint() -
         CMat::Identity(2 * m, 2 * m))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("squeezed cat frame blocks the mode operator as a logical flip") {
  const double alpha = 2.0, r = 1.3;
  const Index n = 250;
  const SubsystemFrame frame = squeezed_cat_frame(alpha, r, n, 6);
  REQUIRE(frame.dim_gauge >= 3);
  const Index m = frame.dim_gauge;
  const CMat a_phys = annihilation(n);
  const CMat blocked = frame.isometry * a_phys * frame.isometry.adjoint();
  const CMat a_g = annihilation(m);
  const CMat gauge_part = alpha * std::exp(-r) * CMat::Identity(m, m) +
                          std::cosh(r) * a_g - std::sinh(r) * a_g.adjoint();
  const CMat want = tensor_product(pauli_z(), gauge_part);
  // Adjacent cat levels overlap by <n|D(2 alpha)|n+1>, so the clean ladder
  // form degrades up the gauge ladder; the ground block is the sharp check.
  double worst_ground = 0.0, worst_two = 0.0;
  for (Index i = 0; i < 2 * m; ++i)
    for (Index j = 0; j < 2 * m; ++j) {
      const double err = std::abs(blocked(i, j) - want(i, j));
      if (i % m == 0 && j % m == 0) worst_ground = std::max(worst_ground, err);
      if (i % m <= 1 && j % m <= 1) worst_two = std::max(worst_two, err);
    }
  CHECK(worst_ground < 1e-2);
  CHECK(worst_two < 5e-2);
}

TEST_CASE("squeezed cat frame refuses an insufficient truncation") {
  CHECK_THROWS_AS(squeezed_cat_frame(2.0, 1.3, 40), NumericalError);
}

TEST_CASE("frame json round trip preserves every field") {
  const CodeSpec code = three_qubit_code();
  const QuantumChannel ch = three_qubit_single_flip_channel(0.1);
  const SubsystemFrame frame =
      build_frame(code, ch, three_qubit_frame().isometry);
  const nlohmann::json j = frame_to_json(frame);
  const SubsystemFrame back = frame_from_json(j);
  CHECK(back.dim_logical == frame.dim_logical);
  CHECK(back.dim_gauge == frame.dim_gauge);
  CHECK(back.dim_physical == frame.dim_physical);
  CHECK(back.layout == frame.layout);
  CHECK((back.isometry - frame.isometry).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(back.logical_unitaries.size() == frame.logical_unitaries.size());
  for (size_t i = 0; i < back.logical_unitaries.size(); ++i)
    CHECK((back.logical_unitaries[i] - frame.logical_unitaries[i])
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  CHECK(back.probabilities == frame.probabilities);
  CHECK(back.gauge_labels == frame.gauge_labels);
  CHECK(back.dropped_kraus == frame.dropped_kraus);
  CHECK(back.kraus_to_gauge == frame.kraus_to_gauge);
}

TEST_CASE("code construction validates orthonormality and dimensions") {
  CVec a = CVec::Zero(4), b = CVec::Zero(4);
  a(0) = 1.0;
  b(0) = 1.0 / std::sqrt(2.0);
  b(1) = 1.0 / std::sqrt(2.0);
  CHECK_THROWS_AS(CodeSpec::from_codewords(4, {a, b}), InvariantViolation);
  CHECK_THROWS_AS(CodeSpec::from_codewords(5, {a, b}), DimensionError);
  const CodeSpec code = three_qubit_code();
  const QuantumChannel wrong_dim = bit_flip_channel(0.1);
  CHECK_THROWS_AS(check_kl(code, wrong_dim), DimensionError);
}
