#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nmsim/channels.hpp"
#include "test_util.hpp"

using namespace nmsim;

TEST_CASE("bit-flip superoperator has the conj-kron structure") {
  const double f = 0.17;
  const Superoperator s = kraus_to_superoperator(bit_flip_channel(f));
  const CMat x = pauli_x();
  const CMat expect =
      (1 - f) * CMat::Identity(4, 4) + f * tensor_product(x.conjugate(), x);
  CHECK((s.m - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.is_trace_preserving());
  CHECK(s.hermiticity_preservation_defect() < 1e-14);
}

TEST_CASE("choi of the identity channel is the normalized Bell projector") {
  const Superoperator id = Superoperator::identity(2);
  const ChoiMatrix c = superoperator_to_choi(id);
  CHECK(std::abs(c.m.trace() - cplx(1, 0)) < 1e-14);
  CVec bell = CVec::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  CHECK((c.m - bell * bell.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("bit-flip Choi eigenvalues are the mixture weights") {
  // oracle: the two Choi components are orthogonal rank-one projectors
  const double f = 0.09;
  const ChoiMatrix c = kraus_to_choi(bit_flip_channel(f));
  Eigen::SelfAdjointEigenSolver<CMat> es(c.m, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.eigenvalues()(2) == doctest::Approx(f).epsilon(1e-12));
  CHECK(es.eigenvalues()(3) == doctest::Approx(1 - f).epsilon(1e-12));
}

TEST_CASE("representation round trips agree on random CPTP channels") {
  std::mt19937 rng(1234);
  for (int rep = 0; rep < 20; ++rep) {
    const Index dim = 2 + rep % 3;
    const auto ch = testutil::random_cptp(dim, 3, rng);
    CHECK(ch.tp_defect() < 1e-12);

    const Superoperator s = kraus_to_superoperator(ch);
    const ChoiMatrix c = superoperator_to_choi(s);
    CHECK(std::abs(c.m.trace() - cplx(1, 0)) < 1e-10);

    const auto rep_cp = cp_check(c);
    CHECK(rep_cp.is_cp);
    CHECK(rep_cp.min_eigenvalue > -1e-10);

    const QuantumChannel back = choi_to_kraus(c);
    const Superoperator s2 = kraus_to_superoperator(back);
    CHECK((s.m - s2.m).cwiseAbs().maxCoeff() < 1e-10);

    const Superoperator s3 = choi_to_superoperator(c);
    CHECK((s.m - s3.m).cwiseAbs().maxCoeff() < 1e-10);

    // applying the channel and the superoperator agree on a random state
    const CMat rho = testutil::random_density(dim, rng);
    CHECK((ch.apply(rho) - s.apply(rho)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("superoperator composition is matrix multiplication") {
  std::mt19937 rng(99);
  const auto f = testutil::random_cptp(3, 2, rng);
  const auto g = testutil::random_cptp(3, 4, rng);
  const Superoperator sf = kraus_to_superoperator(f);
  const Superoperator sg = kraus_to_superoperator(g);
  const Superoperator comp = sf.compose_after(sg);
  const CMat rho = testutil::random_density(3, rng);
  const CMat seq = f.apply(g.apply(rho));
  CHECK((comp.apply(rho) - seq).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cp_check flags the transpose map") {
  // transpose Choi is the swap operator over d, eigenvalues +-1/d
  const Index d = 2;
  CMat s(d * d, d * d);
  s.setZero();
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      CMat e = CMat::Zero(d, d);
      e(i, j) = 1.0;
      const CMat te = e.transpose();
      for (Index k = 0; k < d; ++k)
        for (Index l = 0; l < d; ++l)
          s(l * d + k, j * d + i) = te(k, l);
    }
  const Superoperator transpose{s, d, d};
  const auto rep = cp_check(superoperator_to_choi(transpose));
  CHECK_FALSE(rep.is_cp);
  CHECK(rep.min_eigenvalue == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("cp_check rejects non-hermitian input") {
  ChoiMatrix c;
  c.dim_in = c.dim_out = 2;
  c.m = CMat::Identity(4, 4) * 0.25;
  c.m(0, 1) = 0.3;  // break hermiticity
  CHECK_THROWS_AS(cp_check(c), InvariantViolation);
}

TEST_CASE("pauli mix superoperator matches kraus form on valid weights") {
  const double w = 0.2;
  const Superoperator a = pauli_mix_superoperator(1 - w, w, 0, 0);
  const Superoperator b = kraus_to_superoperator(bit_flip_channel(w));
  CHECK((a.m - b.m).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("channel weight domains are enforced") {
  CHECK_THROWS_AS(bit_flip_channel(-0.1), InvariantViolation);
  CHECK_THROWS_AS(phase_flip_channel(1.2), InvariantViolation);
}
