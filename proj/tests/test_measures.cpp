#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nmsim/channels.hpp"
#include "nmsim/measures.hpp"
#include "test_util.hpp"

using namespace nmsim;

namespace {

// Dephasing family with oscillating rate c(t) = c0 cos(omega t): the weight
// w(t) = (1 - exp(-2 (c0/omega) sin(omega t)))/2 rises and then falls back,
// so intermediate maps turn non-CP once the rate goes negative.
struct CosFamily {
  double c0, omega;
  double rate(double t) const { return c0 * std::cos(omega * t); }
  double weight(double t) const {
    return 0.5 * (1.0 - std::exp(-2.0 * (c0 / omega) * std::sin(omega * t)));
  }
  Superoperator map(double t) const {
    const double w = weight(t);
    return pauli_mix_superoperator(1.0 - w, 0.0, 0.0, w);
  }
  MapFamily family(double t_end, int n) const {
    MapFamily fam;
    fam.t1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = t_end * i / (n - 1);
      fam.times.push_back(t);
      fam.maps.push_back(map(t));
      fam.invertibility.push_back(condition_number(fam.maps.back().m));
    }
    fam.evaluator = [*this](double t) { return map(t); };
    return fam;
  }
};

// Three unit-norm jumps keep the Kossakowski matrix full rank, so every
// canonical rate sits well above finite-difference extraction noise.
MapFamily random_markovian_family(std::mt19937& rng, int n_times) {
  const CMat h = testutil::random_hermitian(2, rng);
  std::uniform_real_distribution<double> rate(0.1, 1.5);
  std::vector<std::pair<CMat, double>> diss;
  for (int j = 0; j < 3; ++j) {
    CMat op = testutil::randn_complex(2, 2, rng);
    op /= op.norm();
    diss.emplace_back(op, rate(rng));
  }
  const GkslGenerator gen = GkslGenerator::make(2, h, std::move(diss));
  std::vector<double> times(n_times);
  for (int i = 0; i < n_times; ++i) times[i] = 1.0 * i / (n_times - 1);
  return semigroup_family(Superoperator{CMat(liouvillian_matrix(gen)), 2, 2},
                          times);
}

}  // namespace

TEST_CASE("backflow density matches the signed dephasing rate") {
  const CosFamily cf{0.5, 2.0};
  const MapFamily fam = cf.family(1.4, 801);
  const double delta = 1e-5;

  // negative rate region: n(t) = 2|c(t)| up to O(delta)
  for (double t : {0.9, 1.0, 1.2}) {
    const double c = cf.rate(t);
    REQUIRE(c < 0.0);
    CHECK(rhp_density(fam, t, delta) ==
          doctest::Approx(2.0 * std::abs(c)).epsilon(1e-4));
  }
  // positive rate region: intermediate maps are CP, density vanishes
  CHECK(std::abs(rhp_density(fam, 0.3, delta)) < 1e-8);
}

TEST_CASE("backflow density pins the normalized Choi convention") {
  // bit-flip weight decreasing 0.2 -> 0.15 gives intermediate weight
  // g = -0.05/0.6; Choi eigenvalues (1-g, g), trace norm 1 + 2|g|
  MapFamily fam;
  fam.t1 = 0.0;
  fam.times = {0.0, 0.1};
  fam.maps = {pauli_mix_superoperator(0.8, 0.2, 0.0, 0.0),
              pauli_mix_superoperator(0.85, 0.15, 0.0, 0.0)};
  fam.invertibility = {condition_number(fam.maps[0].m),
                       condition_number(fam.maps[1].m)};
  const double g = -0.05 / 0.6;
  CHECK(rhp_density(fam, 0.0, 0.1) ==
        doctest::Approx(2.0 * std::abs(g) / 0.1).epsilon(1e-10));
}

TEST_CASE("backflow integral, rate integral, and their factor of two") {
  const CosFamily cf{0.5, 2.0};
  const double t_end = 1.4;
  const MapFamily fam = cf.family(t_end, 801);

  // dense closed-form reference for R = integral of max(0, -c)
  double r_ref = 0.0;
  const int n_ref = 20001;
  for (int i = 0; i + 1 < n_ref; ++i) {
    const double a = t_end * i / (n_ref - 1);
    const double b = t_end * (i + 1) / (n_ref - 1);
    r_ref += 0.5 * (std::max(0.0, -cf.rate(a)) + std::max(0.0, -cf.rate(b))) *
             (b - a);
  }

  const double delta = t_end / 800;
  const MeasureResult rhp = rhp_measure(fam, 0.0, t_end, delta);
  CHECK(rhp.value == doctest::Approx(2.0 * r_ref).epsilon(2e-3));
  CHECK(rhp.sample_times.size() == 801);

  const RateSamples samples = sample_canonical_rates(fam, 0.0, t_end, 401, 1e-4);
  // the dominant extracted rate tracks c(t); the other channels are silent
  for (size_t i = 0; i < samples.times.size(); i += 40) {
    const auto& row = samples.rates[i];
    const double c = cf.rate(samples.times[i]);
    const double dominant = std::abs(c + 0.0) < 1e-12
                                ? 0.0
                                : (c > 0 ? row.front() : row.back());
    CHECK(dominant == doctest::Approx(c).epsilon(1e-5));
    double others = 0.0;
    for (const double r : row) others += std::abs(r);
    CHECK(others - std::abs(dominant) < 1e-7);
  }

  const MeasureResult dr = decay_rate_measure(samples.times, samples.rates);
  CHECK(dr.value == doctest::Approx(r_ref).epsilon(1e-3));
  CHECK(rhp.value == doctest::Approx(2.0 * dr.value).epsilon(2e-3));
  CHECK(dr.channel_integrals.size() == 3);
}

TEST_CASE("distinguishability search finds the equatorial revival") {
  const CosFamily cf{0.5, 2.0};
  const double t_end = 1.4;
  const MapFamily fam = cf.family(t_end, 801);

  // equatorial pairs contract to exp(-0.5) at omega t = pi/2, then revive
  const double d_min = std::exp(-2.0 * 0.25);
  const double d_end = std::exp(-2.0 * 0.25 * std::sin(2.0 * t_end));
  const double expect = d_end - d_min;

  const MeasureResult res = blp_measure(fam, 0.0, t_end);
  CHECK(res.value == doctest::Approx(expect).epsilon(1e-4));
  CHECK(std::abs(res.blp.theta - M_PI / 2) < 1e-3);
  CHECK(res.blp.trace_distances.size() == 801);
  CHECK(res.blp.stage_values.size() == 21);
  // the optimum pair is orthogonal
  CHECK(std::abs(res.blp.state1.dot(res.blp.state2)) < 1e-12);
}

TEST_CASE("pair objective is symmetric under swapping the pair") {
  const CosFamily cf{0.5, 2.0};
  const MapFamily fam = cf.family(1.4, 201);
  for (double theta : {0.3, 1.1, 2.0}) {
    for (double phi : {0.0, 0.8, 4.0}) {
      const double a = blp_pair_value(fam, 0.0, 1.4, theta, phi);
      const double b = blp_pair_value(fam, 0.0, 1.4, M_PI - theta, phi + M_PI);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("markovian families carry no backflow") {
  std::mt19937 rng(101);
  for (int rep = 0; rep < 25; ++rep) {
    const MapFamily fam = random_markovian_family(rng, 41);
    const MeasureResult rhp = rhp_measure(fam, 0.0, 1.0, 0.025);
    CHECK(rhp.value >= 0.0);
    CHECK(rhp.value < 1e-9);

    const BlpSearchConfig quick{16, 4};
    const MeasureResult blp = blp_measure(fam, 0.0, 1.0, quick);
    CHECK(blp.value >= 0.0);
    CHECK(blp.value < 1e-9);

    const RateSamples s = sample_canonical_rates(fam, 0.0, 1.0, 51, 1e-3);
    const MeasureResult dr = decay_rate_measure(s.times, s.rates);
    CHECK(dr.value >= 0.0);
    CHECK(dr.value < 1e-9);
  }
}

TEST_CASE("decay rate measure integrates negative parts per channel") {
  CHECK(decay_rate_measure({0.0, 0.5, 1.0}, {{0.3, 1.0}, {0.2, 2.0}, {0.1, 0.5}})
            .value == 0.0);

  const MeasureResult dr =
      decay_rate_measure({0.0, 1.0}, {{1.0, -2.0}, {1.0, -2.0}});
  CHECK(dr.value == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(dr.channel_integrals.size() == 2);
  CHECK(dr.channel_integrals[0] == 0.0);
  CHECK(dr.channel_integrals[1] == doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(decay_rate_measure({0.0, 1.0}, {{1.0}}), DimensionError);
  CHECK_THROWS_AS(decay_rate_measure({0.0, 1.0}, {{1.0}, {1.0, 2.0}}),
                  DimensionError);
  CHECK_THROWS_AS(decay_rate_measure({1.0, 1.0}, {{1.0}, {1.0}}), ConfigError);
}

TEST_CASE("reference decay rates evaluate their closed forms") {
  ClosedFormParams p3;
  p3.p = 0.1;
  p3.q = 0.028;
  CHECK(closed_form_R(ClosedFormKind::ThreeQubit, p3) ==
        doctest::Approx(0.5 * std::log(0.944 / 0.8)).epsilon(1e-14));
  CHECK(closed_form_R(ClosedFormKind::ThreeQubit, p3) ==
        doctest::Approx(0.0827572).epsilon(1e-5));
  p3.q = p3.p;
  CHECK(closed_form_R(ClosedFormKind::ThreeQubit, p3) == 0.0);

  ClosedFormParams tp;
  tp.gamma = 1.0;
  tp.t_start = std::log(2.0);
  tp.t_end = std::numeric_limits<double>::infinity();
  CHECK(closed_form_R(ClosedFormKind::Teleport, tp) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  ClosedFormParams cat;
  cat.lambda = 1.0;
  cat.gamma = 1.0;
  cat.t_end = 1.0;
  CHECK(closed_form_R(ClosedFormKind::SqueezedCat, cat) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  cat.lambda = 0.5;
  cat.t_end = std::numeric_limits<double>::infinity();
  CHECK(closed_form_R(ClosedFormKind::SqueezedCat, cat) ==
        doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("reference decay rates reject singular parameters") {
  ClosedFormParams bad;
  bad.p = 0.5;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::ThreeQubit, bad), ConfigError);
  bad.p = -0.1;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::ThreeQubit, bad), ConfigError);
  bad.p = 0.1;
  bad.q = 0.5;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::ThreeQubit, bad), ConfigError);

  ClosedFormParams tp;
  tp.gamma = 1.0;
  tp.t_start = 0.0;
  tp.t_end = 1.0;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::Teleport, tp), ConfigError);
  tp.t_start = 2.0;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::Teleport, tp), ConfigError);
  tp.t_start = 0.5;
  tp.gamma = 0.0;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::Teleport, tp), ConfigError);

  ClosedFormParams cat;
  cat.gamma = -1.0;
  cat.t_end = 1.0;
  CHECK_THROWS_AS(closed_form_R(ClosedFormKind::SqueezedCat, cat), ConfigError);
}

TEST_CASE("windows and search configs are validated") {
  const CosFamily cf{0.5, 2.0};
  const MapFamily fam = cf.family(1.4, 201);
  CHECK_THROWS_AS(rhp_measure(fam, 0.0, 0.7123, 1e-3), ConfigError);
  CHECK_THROWS_AS(rhp_measure(fam, 0.7, 0.7, 1e-3), ConfigError);
  CHECK_THROWS_AS(rhp_density(fam, 0.7, 0.0), ConfigError);
  CHECK_THROWS_AS(blp_measure(fam, 0.0, 1.4, BlpSearchConfig{4, 20}),
                  ConfigError);
  CHECK_THROWS_AS(blp_measure(fam, 0.0, 1.4, BlpSearchConfig{16, 0}),
                  ConfigError);
  CHECK_THROWS_AS(sample_canonical_rates(fam, 0.0, 1.4, 1, 1e-3), ConfigError);
  CHECK_THROWS_AS(sample_canonical_rates(fam, 0.0, 1.4, 11, 0.0), ConfigError);
  CHECK_THROWS_AS(sample_canonical_rates(fam, 0.0, 1e-4, 11, 1e-3),
                  ConfigError);

  // sampling never reaches before the family origin
  const RateSamples s = sample_canonical_rates(fam, 0.0, 1.4, 11, 1e-3);
  CHECK(s.times.front() == doctest::Approx(1e-3).epsilon(1e-12));

  const GkslGenerator qutrit = GkslGenerator::make(3, CMat(), {});
  const MapFamily triv = semigroup_family(
      Superoperator{CMat(liouvillian_matrix(qutrit)), 3, 3}, {0.0, 1.0});
  CHECK_THROWS_AS(blp_measure(triv, 0.0, 1.0), DimensionError);
}

TEST_CASE("measure results serialize with their diagnostics") {
  const CosFamily cf{0.5, 2.0};
  const MapFamily fam = cf.family(1.4, 101);

  const auto j_rhp = rhp_measure(fam, 0.0, 1.4, 1.4 / 100).to_json();
  CHECK(j_rhp["kind"] == "rhp");
  CHECK(j_rhp["sample_times"].size() == 101);
  CHECK(j_rhp["value"].get<double>() > 0.0);

  const auto j_blp = blp_measure(fam, 0.0, 1.4, BlpSearchConfig{16, 4}).to_json();
  CHECK(j_blp["kind"] == "blp");
  CHECK(j_blp["optimizer"].contains("theta"));
  CHECK(j_blp["optimizer"]["trace_distances"].size() == 101);

  const auto j_dr =
      decay_rate_measure({0.0, 1.0}, {{1.0, -1.0}, {1.0, -1.0}}).to_json();
  CHECK(j_dr["kind"] == "decay_rate");
  CHECK(j_dr["channel_integrals"].size() == 2);
  CHECK(j_dr["window"][1] == 1.0);
}
