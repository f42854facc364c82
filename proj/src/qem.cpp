#include "nmsim/qem.hpp"

#include <cmath>
#include <functional>

#include "nmsim/errors.hpp"

namespace nmsim {

namespace {

void require_tail_params(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon must be in (0, 1)");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
}

double base_bound(double epsilon, double delta) {
  return std::log(2.0 / epsilon) / (2.0 * delta * delta);
}

CVec bloch_state(double theta, double phi) {
  CVec v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::exp(cplx(0.0, phi)) * std::sin(theta / 2.0);
  return v;
}

double pair_samples(const QuantumChannel& ch, double theta, double phi,
                    double epsilon, double delta) {
  const DensityMatrix a = DensityMatrix::pure(bloch_state(theta, phi));
  const DensityMatrix b =
      DensityMatrix::pure(bloch_state(M_PI - theta, phi + M_PI));
  return distinguishability_bound(a, b, ch, epsilon, delta).samples;
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  int iters, double* xbest) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  if (xbest) *xbest = (f1 > f2) ? x1 : x2;
  return std::max(f1, f2);
}

}  // namespace

nlohmann::json QemBound::to_json() const {
  nlohmann::json j;
  j["samples"] = samples;
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["b_max"] = b_max;
  j["context"] = context;
  return j;
}

QemBound unbiased_bound(double p, double epsilon, double delta) {
  if (!(p >= 0.0 && p < 0.5)) throw ConfigError("p must be in [0, 0.5)");
  require_tail_params(epsilon, delta);
  QemBound bound;
  bound.epsilon = epsilon;
  bound.delta = delta;
  const double contrast = 1.0 - 2.0 * p;
  bound.samples = base_bound(epsilon, delta) / (contrast * contrast);
  bound.context = {{"p", p}};
  return bound;
}

double cost_after_qec(double m_p, double R) {
  if (!(m_p > 0.0)) throw ConfigError("sample count must be positive");
  if (R < 0.0) throw ConfigError("R must be nonnegative");
  return m_p * std::exp(-4.0 * R);
}

QemBound distinguishability_bound(const DensityMatrix& rho,
                                  const DensityMatrix& sigma,
                                  const QuantumChannel& ch, double epsilon,
                                  double delta) {
  require_tail_params(epsilon, delta);
  if (rho.dim() != ch.dim_in || sigma.dim() != ch.dim_in)
    throw DimensionError("state pair does not match the channel input");
  const double clean = trace_distance(rho.mat(), sigma.mat());
  if (clean <= 1e-12)
    throw ConfigError("state pair is indistinguishable before the noise");
  const double noisy =
      trace_distance(ch.apply(rho.mat()), ch.apply(sigma.mat()));
  if (noisy < 1e-12)
    throw NumericalError("noisy pair is fully indistinguishable");
  const double ratio = clean / noisy;
  QemBound bound;
  bound.epsilon = epsilon;
  bound.delta = delta;
  bound.samples = ratio * ratio * base_bound(epsilon, delta);
  bound.context = {{"distance_clean", clean},
                   {"distance_noisy", noisy},
                   {"ratio", ratio}};
  return bound;
}

QemBound sweep_orthogonal_pairs(const QuantumChannel& ch, double epsilon,
                                double delta, int n_grid) {
  if (ch.dim_in != 2)
    throw DimensionError("orthogonal-pair sweep expects a qubit channel");
  if (n_grid < 6) throw ConfigError("n_grid must be at least 6");
  require_tail_params(epsilon, delta);

  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  double best = -1.0, theta = 0.0, phi = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n_grid;
    const double th = std::acos(z);
    const double ph = std::fmod(i * golden_angle, 2.0 * M_PI);
    const double value = pair_samples(ch, th, ph, epsilon, delta);
    if (value > best) {
      best = value;
      theta = th;
      phi = ph;
    }
  }

  double width = M_PI / std::sqrt(static_cast<double>(n_grid));
  for (int pass = 0; pass < 8; ++pass) {
    double candidate = 0.0;
    if (pass % 2 == 0) {
      const double lo = std::max(0.0, theta - width);
      const double hi = std::min(M_PI, theta + width);
      const double value = golden_max(
          [&](double th) { return pair_samples(ch, th, phi, epsilon, delta); },
          lo, hi, 25, &candidate);
      if (value > best) {
        best = value;
        theta = candidate;
      }
    } else {
      const double value = golden_max(
          [&](double ph) {
            return pair_samples(ch, theta, ph, epsilon, delta);
          },
          phi - width, phi + width, 25, &candidate);
      if (value > best) {
        best = value;
        phi = candidate;
      }
      width *= 0.6;
    }
  }

  QemBound bound = distinguishability_bound(
      DensityMatrix::pure(bloch_state(theta, phi)),
      DensityMatrix::pure(bloch_state(M_PI - theta, phi + M_PI)), ch, epsilon,
      delta);
  bound.context["theta"] = theta;
  bound.context["phi"] = phi;
  return bound;
}

}  // namespace nmsim
