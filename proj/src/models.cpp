#include "nmsim/models.hpp"

#include <bit>
#include <cmath>
#include <utility>

#include "nmsim/errors.hpp"

namespace nmsim {

namespace {

constexpr double kStateNormTol = 1e-8;
constexpr Index kTailPad = 150;

void require_qubit_state(const CVec& psi, const std::string& name) {
  if (psi.size() != 2) throw DimensionError(name + " must have dimension 2");
  if (std::abs(psi.norm() - 1.0) > kStateNormTol)
    throw ConfigError(name + " must be normalized");
}

// Coherent vector projected to the truncation and renormalized; the tail is
// measured in a padded space because truncated displacements are unitary and
// hide their own leakage.
CVec projected_coherent(cplx amp, Index n_trunc) {
  const Index n_big = n_trunc + kTailPad;
  const CVec full = coherent(amp, n_big);
  const double tail = full.tail(n_big - n_trunc).squaredNorm();
  if (tail > 1e-8)
    throw NumericalError("n_trunc " + std::to_string(n_trunc) +
                         " cannot hold the gauge displacement (tail norm " +
                         std::to_string(tail) + ")");
  CVec head = full.head(n_trunc);
  head /= head.norm();
  return head;
}

Superoperator tomography(const std::function<CMat(const CMat&)>& act,
                         Index dim) {
  Superoperator s;
  s.dim_in = dim;
  s.dim_out = dim;
  s.m = CMat::Zero(dim * dim, dim * dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) {
      CMat unit = CMat::Zero(dim, dim);
      unit(i, j) = 1.0;
      s.m.col(j * dim + i) = vec(act(unit));
    }
  return s;
}

void require_identity_resolution(const std::vector<CMat>& ops, Index dim) {
  CMat sum = CMat::Zero(dim, dim);
  for (const auto& op : ops) sum += op.adjoint() * op;
  if ((sum - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol::herm)
    throw InvariantViolation(
        "recovery operators do not resolve the identity");
}

double real_field(const nlohmann::json& j, const std::string& name) {
  const auto& v = j.at(name);
  if (!v.is_number()) throw ConfigError("params." + name + " must be a number");
  return v.get<double>();
}

cplx complex_entry(const nlohmann::json& v, const std::string& name) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError("params." + name + " must be a number or [re, im]");
}

cplx complex_field(const nlohmann::json& j, const std::string& name) {
  return complex_entry(j.at(name), name);
}

CVec state_field(const nlohmann::json& j, const std::string& name) {
  const auto& v = j.at(name);
  if (!v.is_array() || v.size() != 2)
    throw ConfigError("params." + name +
                      " must be a length-2 array of amplitudes");
  CVec out(2);
  for (Index i = 0; i < 2; ++i)
    out(i) = complex_entry(v[i], name + "[" + std::to_string(i) + "]");
  return out;
}

Index integer_field(const nlohmann::json& j, const std::string& name) {
  const auto& v = j.at(name);
  if (!v.is_number_integer())
    throw ConfigError("params." + name + " must be an integer");
  return v.get<Index>();
}

}  // namespace

ThreeQubitAnalytic three_qubit_analytic(double p, double gamma, double t) {
  if (!(p >= 0.0 && p < 0.5)) throw ConfigError("p must be in [0, 0.5)");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(t >= 0.0)) throw ConfigError("t must be nonnegative");
  const double q = p * p * (3.0 - 2.0 * p);
  const double decay = std::exp(-gamma * t);
  ThreeQubitAnalytic out;
  out.f = q + decay * (p - q);
  const double fprime = -gamma * decay * p * (1.0 - p) * (1.0 - 2.0 * p);
  out.rate = fprime / (1.0 - 2.0 * out.f);
  return out;
}

CMat teleportation_state(double gamma, double t, const CVec& psi,
                         const CMat& rho0) {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(t >= 0.0)) throw ConfigError("t must be nonnegative");
  require_qubit_state(psi, "psi");
  CMat start = rho0;
  if (start.size() == 0) start = CMat::Identity(2, 2) / 2.0;
  if (start.rows() != 2 || start.cols() != 2)
    throw DimensionError("rho0 must be 2x2");
  const double decay = std::exp(-gamma * t);
  return (1.0 - decay) * (psi * psi.adjoint()) + decay * start;
}

TeleportationAnalytic teleportation_analytic(double gamma, double t,
                                             const CVec& psi,
                                             const CMat& rho0) {
  if (!(t > 0.0))
    throw ConfigError("teleportation rate is singular at t = 0");
  TeleportationAnalytic out;
  out.state = teleportation_state(gamma, t, psi, rho0);
  const double decay = std::exp(-gamma * t);
  out.rate = -gamma * decay / (4.0 * (1.0 - decay));
  return out;
}

SqueezedCatAnalytic squeezed_cat_analytic(cplx lambda, double gamma, double t,
                                          cplx c0, cplx c1) {
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(t >= 0.0)) throw ConfigError("t must be nonnegative");
  const double weight = std::norm(c0) + std::norm(c1);
  if (std::abs(weight - 1.0) > kStateNormTol)
    throw ConfigError("logical amplitudes must be normalized");
  const double l2 = std::norm(lambda);
  const double decay = std::exp(-gamma * t);
  const double overlap = std::exp(-2.0 * l2 * decay);
  SqueezedCatAnalytic out;
  out.state = CMat::Zero(2, 2);
  out.state(0, 0) = std::norm(c0);
  out.state(1, 1) = std::norm(c1);
  out.state(0, 1) = c0 * std::conj(c1) * overlap;
  out.state(1, 0) = std::conj(out.state(0, 1));
  out.rate = -l2 * gamma * decay;
  out.x_expectation = 2.0 * (c0 * std::conj(c1)).real() * overlap;
  return out;
}

CMat displacement_error_subsystem(cplx beta, double alpha, double r,
                                  Index n_trunc) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (r < 0.0) throw ConfigError("r must be nonnegative");
  if (n_trunc < 4) throw ConfigError("n_trunc must be at least 4");
  const cplx lambda(beta.real() * std::exp(r), beta.imag() * std::exp(-r));
  projected_coherent(lambda, n_trunc);  // truncation guard
  const double phi = 2.0 * alpha * std::exp(-r) * beta.imag();
  const cplx phase = std::exp(cplx(0.0, phi));
  CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return phase * tensor_product(p0, displacement(lambda, n_trunc)) +
         std::conj(phase) * tensor_product(p1, displacement(-lambda, n_trunc));
}

ThreeQubitModel ThreeQubitModel::make(double p, double gamma) {
  if (!(p >= 0.0 && p < 0.5)) throw ConfigError("p must be in [0, 0.5)");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  ThreeQubitModel model;
  model.p = p;
  model.gamma = gamma;
  model.frame = three_qubit_frame();
  const CMat& v = model.frame.isometry;

  std::vector<CMat> recovery_ops;
  for (Index m = 0; m < 4; ++m) {
    CMat reset = CMat::Zero(4, 4);
    reset(0, m) = 1.0;
    const CMat sub =
        tensor_product(model.frame.logical_unitaries[m].adjoint(), reset);
    recovery_ops.push_back(v.adjoint() * sub * v);
  }
  require_identity_resolution(recovery_ops, 8);
  model.recovery = QuantumChannel::from_kraus(recovery_ops);

  std::vector<std::pair<CMat, double>> dissipators;
  for (const auto& op : recovery_ops) dissipators.emplace_back(op, gamma);
  model.generator = GkslGenerator::make(8, CMat::Zero(8, 8), dissipators);

  std::vector<CMat> flips;
  for (Index mask = 0; mask < 8; ++mask) {
    const int nf = std::popcount(static_cast<unsigned>(mask));
    const double amp =
        std::sqrt(std::pow(p, nf) * std::pow(1.0 - p, 3 - nf));
    CMat k = CMat::Zero(8, 8);
    for (Index b = 0; b < 8; ++b) k(b ^ mask, b) = amp;
    flips.push_back(k);
  }
  model.noise = QuantumChannel::from_kraus(flips);
  return model;
}

LogicalEmbedding ThreeQubitModel::embedding() const {
  const CodeSpec code = three_qubit_code();
  const QuantumChannel corrupt = noise;
  LogicalEmbedding emb;
  emb.dim_logical = 2;
  emb.embed = [code, corrupt](const CMat& u) {
    CMat encoded = CMat::Zero(8, 8);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        encoded +=
            u(i, j) * (code.codewords[i] * code.codewords[j].adjoint());
    return corrupt.apply(encoded);
  };
  return emb;
}

CMat ThreeQubitModel::initial_state(const CVec& logical) const {
  require_qubit_state(logical, "logical state");
  return embedding().embed(logical * logical.adjoint());
}

MapFamily ThreeQubitModel::stage_family() const {
  const LogicalEmbedding emb = embedding();
  const SubsystemFrame& fr = frame;
  const QuantumChannel& rec = recovery;
  MapFamily fam;
  fam.t1 = 1.0;
  fam.times = {1.0, 2.0, 3.0};
  fam.maps.push_back(Superoperator::identity(2));
  fam.maps.push_back(tomography(
      [&](const CMat& u) { return logical_state(emb.embed(u), fr); }, 2));
  fam.maps.push_back(tomography(
      [&](const CMat& u) {
        return logical_state(rec.apply(emb.embed(u)), fr);
      },
      2));
  for (const auto& s : fam.maps)
    fam.invertibility.push_back(condition_number(s.m));
  return fam;
}

TeleportationModel TeleportationModel::make(const CVec& psi, double gamma) {
  require_qubit_state(psi, "psi");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  TeleportationModel model;
  model.psi = psi;
  model.gamma = gamma;
  model.frame = teleportation_frame();
  const CMat bells = model.frame.isometry;
  // The simulation basis is the measurement basis, so the stored frame's
  // gauge rotation is trivial.
  model.frame.isometry = CMat::Identity(4, 4);

  std::vector<CMat> recovery_ops;
  for (Index m = 0; m < 4; ++m) {
    CMat reset = CMat::Zero(4, 4);
    reset(0, m) = 1.0;
    recovery_ops.push_back(
        tensor_product(reset, model.frame.logical_unitaries[m].adjoint()));
  }
  require_identity_resolution(recovery_ops, 8);
  std::vector<std::pair<CMat, double>> dissipators;
  for (const auto& op : recovery_ops) dissipators.emplace_back(op, gamma);
  model.generator = GkslGenerator::make(8, CMat::Zero(8, 8), dissipators);

  // The embedded input must coincide with the Bell rotation of
  // psi (x) Phi00 held on (data qubit) (x) (shared pair).
  CVec phys = CVec::Zero(8);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < 2; ++i) {
    phys(i * 4 + 0) = psi(i) * s;
    phys(i * 4 + 3) = psi(i) * s;
  }
  const CVec rotated = tensor_product(bells, CMat::Identity(2, 2)) * phys;
  const CMat embedded = model.embedding().embed(psi * psi.adjoint());
  if ((embedded - rotated * rotated.adjoint()).cwiseAbs().maxCoeff() >
      tol::herm)
    throw InvariantViolation(
        "teleportation embedding disagrees with the Bell rotation");
  return model;
}

LogicalEmbedding TeleportationModel::embedding() const {
  const std::vector<CMat> qs = frame.logical_unitaries;
  LogicalEmbedding emb;
  emb.dim_logical = 2;
  emb.embed = [qs](const CMat& u) {
    CMat out = CMat::Zero(8, 8);
    for (Index m = 0; m < 4; ++m)
      for (Index mp = 0; mp < 4; ++mp) {
        CMat label = CMat::Zero(4, 4);
        label(m, mp) = 0.25;
        out += tensor_product(label, qs[m] * u * qs[mp].adjoint());
      }
    return out;
  };
  return emb;
}

CMat TeleportationModel::initial_state() const {
  return embedding().embed(psi * psi.adjoint());
}

MapFamily TeleportationModel::relaxation_family(
    const std::vector<double>& times) const {
  Superoperator liouv;
  liouv.dim_in = 2;
  liouv.dim_out = 2;
  const CMat target = psi * psi.adjoint();
  liouv.m = gamma * (vec(target) * vec(CMat::Identity(2, 2)).adjoint() -
                     CMat::Identity(4, 4));
  return semigroup_family(liouv, times);
}

SqueezedCatModel SqueezedCatModel::make(double alpha, double r, cplx lambda,
                                        double gamma, Index n_trunc) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (r < 0.0) throw ConfigError("r must be nonnegative");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (n_trunc < 4) throw ConfigError("n_trunc must be at least 4");
  projected_coherent(lambda, n_trunc);  // truncation guard

  SqueezedCatModel model;
  model.alpha = alpha;
  model.r = r;
  model.lambda = lambda;
  model.gamma = gamma;
  model.n_trunc = n_trunc;

  SubsystemFrame frame;
  frame.dim_logical = 2;
  frame.dim_gauge = n_trunc;
  frame.dim_physical = 2 * n_trunc;
  frame.layout = FrameLayout::LogicalGauge;
  frame.isometry = CMat::Identity(2 * n_trunc, 2 * n_trunc);
  frame.logical_unitaries.assign(static_cast<size_t>(n_trunc),
                                 CMat::Identity(2, 2));
  for (Index n = 0; n < n_trunc; ++n)
    frame.gauge_labels.push_back(std::to_string(n));
  model.frame = std::move(frame);

  const CMat jump = tensor_product(pauli_z(), annihilation(n_trunc));
  model.generator =
      GkslGenerator::make(2 * n_trunc, CMat::Zero(2 * n_trunc, 2 * n_trunc),
                          {{jump, gamma}});
  return model;
}

LogicalEmbedding SqueezedCatModel::embedding() const {
  const Index n = n_trunc;
  std::vector<CVec> gauge = {projected_coherent(lambda, n),
                             projected_coherent(-lambda, n)};
  LogicalEmbedding emb;
  emb.dim_logical = 2;
  emb.embed = [gauge, n](const CMat& u) {
    CMat out = CMat::Zero(2 * n, 2 * n);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        out.block(i * n, j * n, n, n) =
            u(i, j) * (gauge[i] * gauge[j].adjoint());
    return out;
  };
  return emb;
}

CMat SqueezedCatModel::initial_state(cplx c0, cplx c1) const {
  const double weight = std::norm(c0) + std::norm(c1);
  if (std::abs(weight - 1.0) > kStateNormTol)
    throw ConfigError("logical amplitudes must be normalized");
  CVec v = CVec::Zero(2 * n_trunc);
  v.head(n_trunc) = c0 * projected_coherent(lambda, n_trunc);
  v.tail(n_trunc) = c1 * projected_coherent(-lambda, n_trunc);
  return v * v.adjoint();
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::ThreeQubit: return "three_qubit";
    case ModelKind::Teleportation: return "teleportation";
    case ModelKind::SqueezedCat: return "squeezed_cat";
  }
  throw ConfigError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "three_qubit") return ModelKind::ThreeQubit;
  if (name == "teleportation") return ModelKind::Teleportation;
  if (name == "squeezed_cat") return ModelKind::SqueezedCat;
  throw ConfigError("unknown scenario '" + name + "'");
}

nlohmann::json default_model_params(ModelKind kind) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case ModelKind::ThreeQubit:
      return {{"p", 0.1}, {"gamma", 1.0}};
    case ModelKind::Teleportation:
      return {{"gamma", 1.0}, {"psi", nlohmann::json::array({1.0, 0.0})}};
    case ModelKind::SqueezedCat:
      return {{"alpha", 2.0}, {"r", 1.3},      {"lambda", 1.0},
              {"gamma", 1.0}, {"n_trunc", 40}, {"c0", s},
              {"c1", s}};
  }
  throw ConfigError("unknown model kind");
}

ModelBundle build_model(ModelKind kind, const nlohmann::json& params) {
  if (!params.is_object() && !params.is_null())
    throw ConfigError("params must be an object");
  nlohmann::json eff = default_model_params(kind);
  if (params.is_object())
    for (const auto& [key, value] : params.items()) {
      if (!eff.contains(key))
        throw ConfigError("params: unknown key '" + key + "' for scenario '" +
                          model_kind_name(kind) + "'");
      eff[key] = value;
    }

  ModelBundle bundle;
  bundle.kind = kind;
  bundle.effective_params = eff;

  if (kind == ModelKind::ThreeQubit) {
    const double p = real_field(eff, "p");
    const double gamma = real_field(eff, "gamma");
    ThreeQubitModel model = ThreeQubitModel::make(p, gamma);
    bundle.generator = model.generator;
    bundle.frame = model.frame;
    bundle.embedding = model.embedding();
    CVec zero = CVec::Zero(2);
    zero(0) = 1.0;
    bundle.initial = model.initial_state(zero);
    bundle.observable_name = "flip_weight";
    const SubsystemFrame fr = model.frame;
    bundle.observable = [fr](const CMat& rho) {
      return logical_state(rho, fr)(1, 1).real();
    };
    bundle.analytic_observable = [p, gamma](double t) {
      return three_qubit_analytic(p, gamma, t).f;
    };
    bundle.analytic_rate = [p, gamma](double t) {
      return three_qubit_analytic(p, gamma, t).rate;
    };
    bundle.closed_form = ClosedFormKind::ThreeQubit;
    bundle.closed_form_params.p = p;
    bundle.closed_form_params.q = p * p * (3.0 - 2.0 * p);
    bundle.closed_form_params.gamma = gamma;
    return bundle;
  }

  if (kind == ModelKind::Teleportation) {
    const double gamma = real_field(eff, "gamma");
    const CVec psi = state_field(eff, "psi");
    TeleportationModel model = TeleportationModel::make(psi, gamma);
    bundle.generator = model.generator;
    bundle.frame = model.frame;
    bundle.embedding = model.embedding();
    bundle.initial = model.initial_state();
    bundle.observable_name = "fidelity_to_psi";
    const SubsystemFrame fr = model.frame;
    const CVec target = model.psi;
    bundle.observable = [fr, target](const CMat& rho) {
      return fidelity_with_pure(logical_state(rho, fr), target);
    };
    bundle.analytic_observable = [gamma](double t) {
      return 1.0 - 0.5 * std::exp(-gamma * t);
    };
    bundle.analytic_rate = [gamma, target](double t) {
      return teleportation_analytic(gamma, t, target).rate;
    };
    bundle.closed_form = ClosedFormKind::Teleport;
    bundle.closed_form_params.gamma = gamma;
    bundle.control_family = [model](const std::vector<double>& times) {
      return model.relaxation_family(times);
    };
    return bundle;
  }

  const double alpha = real_field(eff, "alpha");
  const double r = real_field(eff, "r");
  const cplx lambda = complex_field(eff, "lambda");
  const double gamma = real_field(eff, "gamma");
  const Index n_trunc = integer_field(eff, "n_trunc");
  const cplx c0 = complex_field(eff, "c0");
  const cplx c1 = complex_field(eff, "c1");
  SqueezedCatModel model =
      SqueezedCatModel::make(alpha, r, lambda, gamma, n_trunc);
  bundle.generator = model.generator;
  bundle.frame = model.frame;
  bundle.embedding = model.embedding();
  bundle.initial = model.initial_state(c0, c1);
  bundle.observable_name = "x_expectation";
  const SubsystemFrame fr = model.frame;
  bundle.observable = [fr](const CMat& rho) {
    const CMat rl = logical_state(rho, fr);
    return (rl(0, 1) + rl(1, 0)).real();
  };
  bundle.analytic_observable = [lambda, gamma, c0, c1](double t) {
    return squeezed_cat_analytic(lambda, gamma, t, c0, c1).x_expectation;
  };
  bundle.analytic_rate = [lambda, gamma, c0, c1](double t) {
    return squeezed_cat_analytic(lambda, gamma, t, c0, c1).rate;
  };
  bundle.closed_form = ClosedFormKind::SqueezedCat;
  bundle.closed_form_params.lambda = std::abs(lambda);
  bundle.closed_form_params.gamma = gamma;
  return bundle;
}

}  // namespace nmsim
