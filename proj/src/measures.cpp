#include "nmsim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nmsim/channels.hpp"
#include "nmsim/errors.hpp"
#include "nmsim/json_util.hpp"

namespace nmsim {

namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return acc;
}

std::pair<Index, Index> window_indices(const MapFamily& fam, double t_start,
                                       double t_end) {
  const Index i0 = fam.grid_index(t_start);
  const Index i1 = fam.grid_index(t_end);
  if (i1 <= i0)
    throw ConfigError("measure window must cover at least one grid step");
  return {i0, i1};
}

CVec bloch_state(double theta, double phi) {
  CVec psi(2);
  psi << cplx(std::cos(0.5 * theta), 0.0),
      std::exp(cplx(0.0, phi)) * std::sin(0.5 * theta);
  return psi;
}

struct BlpWindow {
  std::vector<const Superoperator*> maps;
  std::vector<double> times;
};

BlpWindow blp_window(const MapFamily& fam, double t_start, double t_end) {
  if (fam.dim() != 2)
    throw DimensionError("distinguishability search requires a qubit family");
  const auto [i0, i1] = window_indices(fam, t_start, t_end);
  BlpWindow w;
  for (Index i = i0; i <= i1; ++i) {
    w.maps.push_back(&fam.maps[i]);
    w.times.push_back(fam.times[i]);
  }
  return w;
}

double pair_value_on(const BlpWindow& w, double theta, double phi,
                     std::vector<double>* distances) {
  const CVec psi1 = bloch_state(theta, phi);
  const CVec psi2 = bloch_state(M_PI - theta, phi + M_PI);
  const CVec v1 = vec(CMat(psi1 * psi1.adjoint()));
  const CVec v2 = vec(CMat(psi2 * psi2.adjoint()));
  if (distances) distances->clear();
  double value = 0.0;
  double prev = 0.0;
  for (size_t i = 0; i < w.maps.size(); ++i) {
    const CMat r1 = unvec(CVec(w.maps[i]->m * v1), 2, 2);
    const CMat r2 = unvec(CVec(w.maps[i]->m * v2), 2, 2);
    const double d = trace_distance(r1, r2);
    if (distances) distances->push_back(d);
    if (i > 0) value += std::max(0.0, d - prev);
    prev = d;
  }
  return value;
}

// Fixed-iteration golden-section maximization on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b,
                  int iters, double* xbest) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  if (fc > fd) {
    *xbest = c;
    return fc;
  }
  *xbest = d;
  return fd;
}

}  // namespace

std::string measure_kind_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Rhp: return "rhp";
    case MeasureKind::Blp: return "blp";
    case MeasureKind::DecayRate: return "decay_rate";
  }
  throw ConfigError("unknown measure kind");
}

nlohmann::json MeasureResult::to_json() const {
  nlohmann::json j;
  j["kind"] = measure_kind_name(kind);
  j["value"] = value;
  j["window"] = {t_start, t_end};
  j["sample_times"] = sample_times;
  j["integrand"] = integrand;
  if (kind == MeasureKind::DecayRate)
    j["channel_integrals"] = channel_integrals;
  if (kind == MeasureKind::Blp) {
    nlohmann::json b;
    b["theta"] = blp.theta;
    b["phi"] = blp.phi;
    b["state1"] = mat_to_json(CMat(blp.state1));
    b["state2"] = mat_to_json(CMat(blp.state2));
    b["trace_distances"] = blp.trace_distances;
    b["stage_values"] = blp.stage_values;
    j["optimizer"] = b;
  }
  return j;
}

double rhp_density(const MapFamily& fam, double t, double delta) {
  if (!(delta > 0.0))
    throw ConfigError("backflow density requires a positive delta");
  const Superoperator inter = intermediate_map(fam, t, t + delta);
  return (trace_norm(superoperator_to_choi(inter).m) - 1.0) / delta;
}

MeasureResult rhp_measure(const MapFamily& fam, double t_start, double t_end,
                          double delta) {
  const auto [i0, i1] = window_indices(fam, t_start, t_end);
  MeasureResult res;
  res.kind = MeasureKind::Rhp;
  res.t_start = t_start;
  res.t_end = t_end;
  for (Index i = i0; i <= i1; ++i) {
    res.sample_times.push_back(fam.times[i]);
    res.integrand.push_back(rhp_density(fam, fam.times[i], delta));
  }
  res.value = std::max(0.0, trapezoid(res.sample_times, res.integrand));
  return res;
}

double blp_pair_value(const MapFamily& fam, double t_start, double t_end,
                      double theta, double phi) {
  return pair_value_on(blp_window(fam, t_start, t_end), theta, phi, nullptr);
}

MeasureResult blp_measure(const MapFamily& fam, double t_start, double t_end,
                          const BlpSearchConfig& search) {
  if (search.n_grid < 6)
    throw ConfigError("distinguishability search needs n_grid >= 6");
  if (search.refine_iters < 1)
    throw ConfigError("distinguishability search needs refine_iters >= 1");
  const BlpWindow w = blp_window(fam, t_start, t_end);

  MeasureResult res;
  res.kind = MeasureKind::Blp;
  res.t_start = t_start;
  res.t_end = t_end;

  // Fibonacci lattice over the sphere; ties keep the earliest index.
  const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
  double best = -1.0;
  double best_theta = 0.0;
  double best_phi = 0.0;
  for (int i = 0; i < search.n_grid; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / search.n_grid;
    const double theta = std::acos(std::clamp(z, -1.0, 1.0));
    const double phi = std::fmod(i * golden_angle, 2.0 * M_PI);
    const double v = pair_value_on(w, theta, phi, nullptr);
    if (v > best) {
      best = v;
      best_theta = theta;
      best_phi = phi;
    }
  }
  res.blp.stage_values.push_back(best);

  double width = M_PI / std::sqrt(static_cast<double>(search.n_grid));
  for (int pass = 0; pass < search.refine_iters; ++pass) {
    double xbest = 0.0;
    double v = 0.0;
    if (pass % 2 == 0) {
      v = golden_max(
          [&](double th) { return pair_value_on(w, th, best_phi, nullptr); },
          best_theta - width, best_theta + width, 25, &xbest);
      if (v > best) {
        best = v;
        best_theta = xbest;
      }
    } else {
      v = golden_max(
          [&](double ph) { return pair_value_on(w, best_theta, ph, nullptr); },
          best_phi - width, best_phi + width, 25, &xbest);
      if (v > best) {
        best = v;
        best_phi = xbest;
      }
      width *= 0.6;
    }
    res.blp.stage_values.push_back(best);
  }

  res.value = pair_value_on(w, best_theta, best_phi, &res.blp.trace_distances);
  res.blp.theta = best_theta;
  res.blp.phi = best_phi;
  res.blp.state1 = bloch_state(best_theta, best_phi);
  res.blp.state2 = bloch_state(M_PI - best_theta, best_phi + M_PI);
  res.sample_times = w.times;
  for (size_t i = 0; i + 1 < res.blp.trace_distances.size(); ++i)
    res.integrand.push_back(std::max(
        0.0, res.blp.trace_distances[i + 1] - res.blp.trace_distances[i]));
  return res;
}

MeasureResult decay_rate_measure(
    const std::vector<double>& times,
    const std::vector<std::vector<double>>& rates) {
  if (times.size() != rates.size())
    throw DimensionError("one rate row is required per sample time");
  if (times.empty()) throw ConfigError("decay rate measure needs samples");
  for (size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw ConfigError("sample times must be strictly increasing");
  const size_t n_channels = rates.front().size();
  for (const auto& row : rates)
    if (row.size() != n_channels)
      throw DimensionError("rate rows must have equal length");

  MeasureResult res;
  res.kind = MeasureKind::DecayRate;
  res.t_start = times.front();
  res.t_end = times.back();
  res.sample_times = times;
  res.integrand.assign(times.size(), 0.0);
  res.channel_integrals.assign(n_channels, 0.0);
  for (size_t k = 0; k < n_channels; ++k) {
    std::vector<double> neg(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
      neg[i] = 0.5 * (std::abs(rates[i][k]) - rates[i][k]);
      res.integrand[i] += neg[i];
    }
    res.channel_integrals[k] = trapezoid(times, neg);
    res.value += res.channel_integrals[k];
  }
  res.value = std::max(0.0, res.value);
  return res;
}

RateSamples sample_canonical_rates(const MapFamily& fam, double t_start,
                                   double t_end, int n_points,
                                   double stencil_h) {
  if (n_points < 2) throw ConfigError("rate sampling needs n_points >= 2");
  if (!(stencil_h > 0.0))
    throw ConfigError("rate sampling needs a positive stencil");
  const double lo = std::max(t_start, fam.t1 + stencil_h);
  if (!(t_end > lo))
    throw ConfigError("rate sampling window is too small for the stencil");
  const Index dim = fam.dim();
  RateSamples out;
  out.times.resize(n_points);
  out.rates.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t = lo + (t_end - lo) * i / (n_points - 1);
    const Superoperator gen = generator_from_family(fam, t, stencil_h);
    const CanonicalGenerator cg = canonical_decompose(gen, t);
    out.times[i] = t;
    out.rates[i].reserve(cg.rates.size());
    for (const double r : cg.rates)
      out.rates[i].push_back(pauli_convention_rate(r, dim));
  }
  return out;
}

double closed_form_R(ClosedFormKind kind, const ClosedFormParams& prm) {
  switch (kind) {
    case ClosedFormKind::ThreeQubit: {
      if (!(prm.p >= 0.0 && prm.p < 0.5) || !(prm.q >= 0.0 && prm.q < 0.5))
        throw ConfigError("flip weights must lie in [0, 1/2)");
      return 0.5 * std::log((1.0 - 2.0 * prm.q) / (1.0 - 2.0 * prm.p));
    }
    case ClosedFormKind::SqueezedCat: {
      if (!(prm.gamma > 0.0) || !(prm.t_end >= 0.0))
        throw ConfigError("cat reference needs gamma > 0 and t_end >= 0");
      return prm.lambda * prm.lambda *
             (1.0 - std::exp(-prm.gamma * prm.t_end));
    }
    case ClosedFormKind::Teleport: {
      if (!(prm.gamma > 0.0))
        throw ConfigError("teleport reference needs gamma > 0");
      if (!(prm.t_start > 0.0) || !(prm.t_end > prm.t_start))
        throw ConfigError("teleport reference needs 0 < t_start < t_end");
      return std::log((1.0 - std::exp(-prm.gamma * prm.t_end)) /
                      (1.0 - std::exp(-prm.gamma * prm.t_start)));
    }
  }
  throw ConfigError("unknown closed form kind");
}

}  // namespace nmsim
