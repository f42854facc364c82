#include "nmsim/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nmsim {

namespace {

constexpr double kDtMatchRel = 1e-14;
constexpr double kGridMatchRel = 1e-9;

bool strictly_increasing(const std::vector<double>& t) {
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) return false;
  return true;
}

}  // namespace

GkslGenerator GkslGenerator::make(
    Index dim, CMat hamiltonian,
    std::vector<std::pair<CMat, double>> dissipators) {
  if (dim <= 0) throw DimensionError("GkslGenerator: dim must be positive");
  if (hamiltonian.size() == 0) hamiltonian = CMat::Zero(dim, dim);
  if (hamiltonian.rows() != dim || hamiltonian.cols() != dim)
    throw DimensionError("GkslGenerator: hamiltonian dimension mismatch");
  if (hermiticity_defect(hamiltonian) > tol::herm)
    throw InvariantViolation("GkslGenerator: hamiltonian not Hermitian");
  for (const auto& [l, rate] : dissipators) {
    if (l.rows() != dim || l.cols() != dim)
      throw DimensionError("GkslGenerator: jump operator dimension mismatch");
    if (!(rate >= 0.0))
      throw InvariantViolation("GkslGenerator: negative rate");
  }
  GkslGenerator gen;
  gen.dim = dim;
  gen.hamiltonian = std::move(hamiltonian);
  gen.dissipators = std::move(dissipators);
  return gen;
}

CMat GkslGenerator::apply(const CMat& rho) const {
  if (rho.rows() != dim || rho.cols() != dim)
    throw DimensionError("GkslGenerator::apply: state dimension mismatch");
  CMat out = cplx(0, -1) * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& [l, rate] : dissipators) {
    const CMat ldl = l.adjoint() * l;
    out += rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

Eigen::SparseMatrix<cplx> liouvillian_matrix(const GkslGenerator& gen) {
  const Index d = gen.dim;
  std::vector<Eigen::Triplet<cplx>> trips;
  auto add_kron = [&](const CMat& a, const CMat& b, cplx scale) {
    for (Index ja = 0; ja < d; ++ja)
      for (Index ia = 0; ia < d; ++ia) {
        const cplx av = a(ia, ja);
        if (av == cplx(0, 0)) continue;
        for (Index jb = 0; jb < d; ++jb)
          for (Index ib = 0; ib < d; ++ib) {
            const cplx bv = b(ib, jb);
            if (bv == cplx(0, 0)) continue;
            trips.emplace_back(ia * d + ib, ja * d + jb, scale * av * bv);
          }
      }
  };
  const CMat id = CMat::Identity(d, d);
  if (gen.hamiltonian.cwiseAbs().maxCoeff() > 0.0) {
    add_kron(id, gen.hamiltonian, cplx(0, -1));
    add_kron(gen.hamiltonian.transpose(), id, cplx(0, 1));
  }
  for (const auto& [l, rate] : gen.dissipators) {
    if (rate == 0.0) continue;
    const CMat ldl = l.adjoint() * l;
    add_kron(l.conjugate(), l, rate);
    add_kron(id, ldl, -0.5 * rate);
    add_kron(ldl.transpose(), id, -0.5 * rate);
  }
  Eigen::SparseMatrix<cplx> m(d * d, d * d);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune([](const Index&, const Index&, const cplx& v) {
    return v != cplx(0, 0);
  });
  return m;
}

StepPropagator::StepPropagator(const Eigen::SparseMatrix<cplx>& liouv)
    : dim_(liouv.rows()) {
  if (liouv.rows() != liouv.cols())
    throw DimensionError("StepPropagator: matrix must be square");
  std::vector<Index> parent(dim_);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (Index k = 0; k < liouv.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(liouv, k); it; ++it) {
      const Index a = find(it.row()), b = find(it.col());
      if (a != b) parent[a] = b;
    }
  std::map<Index, std::vector<Index>> groups;
  for (Index i = 0; i < dim_; ++i) groups[find(i)].push_back(i);
  std::vector<Index> comp_of(dim_), local(dim_);
  for (auto& [root, members] : groups) {
    const Index c = static_cast<Index>(comps_.size());
    for (size_t pos = 0; pos < members.size(); ++pos) {
      comp_of[members[pos]] = c;
      local[members[pos]] = static_cast<Index>(pos);
    }
    comps_.push_back(std::move(members));
  }
  sub_.reserve(comps_.size());
  for (const auto& comp : comps_)
    sub_.emplace_back(CMat::Zero(comp.size(), comp.size()));
  for (Index k = 0; k < liouv.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(liouv, k); it; ++it)
      sub_[comp_of[it.row()]](local[it.row()], local[it.col()]) += it.value();
}

Index StepPropagator::largest_component() const {
  Index best = 0;
  for (const auto& c : comps_)
    best = std::max(best, static_cast<Index>(c.size()));
  return best;
}

const std::vector<CMat>& StepPropagator::exps_for(double dt) const {
  const double tol_dt = kDtMatchRel * std::max(1.0, std::abs(dt));
  for (const auto& [key, exps] : cache_)
    if (std::abs(key - dt) <= tol_dt) return exps;
  std::vector<CMat> exps;
  exps.reserve(sub_.size());
  for (const auto& s : sub_) {
    CMat e = (s * dt).exp();
    if (!e.allFinite())
      throw NumericalError("StepPropagator: non-finite block exponential");
    exps.push_back(std::move(e));
  }
  cache_.emplace_back(dt, std::move(exps));
  return cache_.back().second;
}

CVec StepPropagator::apply(double dt, const CVec& v) const {
  if (v.size() != dim_)
    throw DimensionError("StepPropagator::apply: vector dimension mismatch");
  if (dt == 0.0) return v;
  const std::vector<CMat>& exps = exps_for(dt);
  CVec out(dim_);
  for (size_t c = 0; c < comps_.size(); ++c) {
    const auto& comp = comps_[c];
    CVec x(comp.size());
    for (size_t p = 0; p < comp.size(); ++p) x(p) = v(comp[p]);
    const CVec y = exps[c] * x;
    for (size_t p = 0; p < comp.size(); ++p) out(comp[p]) = y(p);
  }
  return out;
}

Trajectory propagate(const GkslGenerator& gen, const DensityMatrix& rho0,
                     const std::vector<double>& times,
                     const std::string& metadata) {
  if (times.empty() || !strictly_increasing(times))
    throw ConfigError("propagate: times must be nonempty and strictly increasing");
  if (rho0.dim() != gen.dim)
    throw DimensionError("propagate: state and generator dimensions differ");
  const StepPropagator prop(liouvillian_matrix(gen));
  Trajectory traj;
  traj.times = times;
  traj.metadata = metadata;
  traj.states.reserve(times.size());
  traj.states.push_back(rho0);
  CVec v = vec(rho0.mat());
  for (size_t i = 1; i < times.size(); ++i) {
    v = prop.apply(times[i] - times[i - 1], v);
    traj.states.emplace_back(unvec(v, gen.dim, gen.dim));
  }
  return traj;
}

Index MapFamily::grid_index(double t) const {
  for (size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= kGridMatchRel * std::max(1.0, std::abs(t)))
      return static_cast<Index>(i);
  throw ConfigError("MapFamily: time not on the family grid");
}

Superoperator MapFamily::map_at(double t) const {
  for (size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) <= kGridMatchRel * std::max(1.0, std::abs(t)))
      return maps[i];
  if (evaluator) return evaluator(t);
  throw ConfigError("MapFamily: time off grid and no continuous evaluator");
}

namespace {

void check_family_map(const Superoperator& s) {
  if (s.tp_defect() > tol::tp)
    throw InvariantViolation("MapFamily: map is not trace-preserving within tolerance");
}

}  // namespace

MapFamily semigroup_family(const Superoperator& liouvillian,
                           const std::vector<double>& times) {
  if (times.empty() || !strictly_increasing(times))
    throw ConfigError("semigroup_family: bad time grid");
  if (liouvillian.dim_in != liouvillian.dim_out)
    throw DimensionError("semigroup_family: generator must be square");
  MapFamily fam;
  fam.t1 = times.front();
  fam.times = times;
  const CMat l = liouvillian.m;
  const Index k = liouvillian.dim_in;
  for (double t : times) {
    Superoperator s{CMat((l * (t - fam.t1)).exp()), k, k};
    check_family_map(s);
    fam.invertibility.push_back(condition_number(s.m));
    fam.maps.push_back(std::move(s));
  }
  const double t1 = fam.t1;
  fam.evaluator = [l, k, t1](double t) {
    return Superoperator{CMat((l * (t - t1)).exp()), k, k};
  };
  return fam;
}

MapFamily logical_map_family(const GkslGenerator& gen,
                             const LogicalEmbedding& embedding,
                             const SubsystemFrame& frame,
                             const std::vector<double>& times) {
  if (times.empty() || !strictly_increasing(times))
    throw ConfigError("logical_map_family: bad time grid");
  const Index k = embedding.dim_logical;
  if (k != frame.dim_logical)
    throw DimensionError("logical_map_family: embedding/frame logical dims differ");
  if (frame.dim_physical != gen.dim)
    throw DimensionError("logical_map_family: frame/generator dims differ");

  std::vector<CVec> v0(k * k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < k; ++i) {
      CMat unit = CMat::Zero(k, k);
      unit(i, j) = 1.0;
      const CMat emb = embedding.embed(unit);
      if (emb.rows() != gen.dim || emb.cols() != gen.dim)
        throw DimensionError("logical_map_family: embedded operator has wrong dimension");
      if (std::abs(emb.trace() - unit.trace()) > tol::trace)
        throw InvariantViolation("logical_map_family: embedding does not preserve trace");
      v0[j * k + i] = vec(emb);
    }

  auto prop = std::make_shared<StepPropagator>(liouvillian_matrix(gen));
  auto states = std::make_shared<std::vector<std::vector<CVec>>>();
  states->push_back(v0);
  for (size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i] - times[i - 1];
    std::vector<CVec> row;
    row.reserve(v0.size());
    for (const CVec& prev : (*states)[i - 1]) row.push_back(prop->apply(dt, prev));
    states->push_back(std::move(row));
  }

  const Index d = gen.dim;
  auto assemble = [k, d, &frame](const std::vector<CVec>& basis_states) {
    CMat s(k * k, k * k);
    for (Index col = 0; col < k * k; ++col) {
      const CMat full = unvec(basis_states[col], d, d);
      s.col(col) = vec(logical_state(full, frame));
    }
    return Superoperator{std::move(s), k, k};
  };

  MapFamily fam;
  fam.t1 = times.front();
  fam.times = times;
  for (size_t i = 0; i < times.size(); ++i) {
    Superoperator s = assemble((*states)[i]);
    check_family_map(s);
    fam.invertibility.push_back(condition_number(s.m));
    fam.maps.push_back(std::move(s));
  }

  const std::vector<double> grid = times;
  const SubsystemFrame frame_copy = frame;
  fam.evaluator = [prop, states, grid, frame_copy, k, d](double t) {
    const double scale = std::max(1.0, std::abs(t));
    if (t < grid.front() - 1e-12 * scale)
      throw ConfigError("logical_map_family evaluator: time below the family origin");
    size_t i = grid.size() - 1;
    while (i > 0 && grid[i] > t) --i;
    const double delta = t - grid[i];
    std::vector<CVec> stepped;
    stepped.reserve((*states)[i].size());
    for (const CVec& v : (*states)[i])
      stepped.push_back(delta == 0.0 ? v : prop->apply(delta, v));
    CMat s(k * k, k * k);
    for (Index col = 0; col < k * k; ++col) {
      const CMat full = unvec(stepped[col], d, d);
      s.col(col) = vec(logical_state(full, frame_copy));
    }
    return Superoperator{std::move(s), k, k};
  };
  return fam;
}

Superoperator intermediate_map(const MapFamily& fam, double t, double s) {
  if (s < t) throw ConfigError("intermediate_map: requires s >= t");
  const Superoperator et = fam.map_at(t);
  if (s == t) return Superoperator::identity(et.dim_in);
  const Superoperator es = fam.map_at(s);
  const double cond = condition_number(et.m);
  if (!(cond < tol::cond_cap))
    throw NumericalError("intermediate_map: map at t is not invertible within the condition cap");
  Superoperator out{CMat(es.m * pseudo_inverse(et.m)), et.dim_in, es.dim_out};
  const double tp_allow =
      tol::tp + 100.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, cond);
  if (out.tp_defect() > tp_allow)
    throw NumericalError("intermediate_map: inversion lost trace preservation");
  return out;
}

Superoperator generator_from_family(const MapFamily& fam, double t, double h) {
  if (!(h > 0.0)) throw ConfigError("generator_from_family: h must be positive");
  const double scale = std::max(1.0, std::abs(t));
  if (t - h < fam.t1 - 1e-12 * scale)
    throw ConfigError("generator_from_family: left stencil point below the family origin");
  const Superoperator e0 = fam.map_at(t);
  const double cond = condition_number(e0.m);
  if (!(cond < tol::cond_cap))
    throw NumericalError("generator_from_family: map at t is not invertible within the condition cap");
  const Superoperator ep = fam.map_at(t + h);
  const Superoperator em = fam.map_at(t - h);
  CMat l = ((ep.m - em.m) / (2.0 * h)) * pseudo_inverse(e0.m);
  return Superoperator{std::move(l), e0.dim_in, e0.dim_out};
}

std::vector<CMat> traceless_basis(Index dim) {
  if (dim < 2) throw DimensionError("traceless_basis: dim must be at least 2");
  std::vector<CMat> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < dim; ++j)
    for (Index k = j + 1; k < dim; ++k) {
      CMat sym = CMat::Zero(dim, dim);
      sym(j, k) = sym(k, j) = inv_sqrt2;
      basis.push_back(sym);
      CMat asym = CMat::Zero(dim, dim);
      asym(j, k) = cplx(0, -inv_sqrt2);
      asym(k, j) = cplx(0, inv_sqrt2);
      basis.push_back(asym);
    }
  for (Index l = 1; l < dim; ++l) {
    CMat d = CMat::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (Index i = 0; i < l; ++i) d(i, i) = norm;
    d(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(d);
  }
  return basis;
}

CanonicalGenerator canonical_decompose(const Superoperator& generator,
                                       double time, double tol_gen) {
  if (generator.dim_in != generator.dim_out)
    throw DimensionError("canonical_decompose: generator must be square");
  const Index k = generator.dim_in;
  const Index n = k * k;
  std::vector<CMat> f;
  f.reserve(n);
  f.push_back(CMat::Identity(k, k) / std::sqrt(static_cast<double>(k)));
  for (auto& g : traceless_basis(k)) f.push_back(std::move(g));

  CMat chi(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      const CMat kab = tensor_product(f[b].conjugate(), f[a]);
      chi(a, b) = kab.conjugate().cwiseProduct(generator.m).sum();
    }
  const double sym_residual = 0.5 * (chi - chi.adjoint()).cwiseAbs().maxCoeff();
  if (sym_residual > tol_gen)
    throw InvariantViolation("canonical_decompose: input is not Hermiticity-preserving within tolerance");
  const CMat chi_h = 0.5 * (chi + chi.adjoint());

  const double sqrt_k = std::sqrt(static_cast<double>(k));
  CMat phi = CMat::Zero(k, k);
  for (Index i = 1; i < n; ++i) phi += (chi_h(i, 0) / sqrt_k) * f[i];
  const CMat b = phi + (chi_h(0, 0) / (2.0 * k)) * CMat::Identity(k, k);
  const CMat h = cplx(0, -0.5) * (b.adjoint() - b);

  const CMat kossakowski = chi_h.block(1, 1, n - 1, n - 1);
  Eigen::SelfAdjointEigenSolver<CMat> eig(kossakowski);
  if (eig.info() != Eigen::Success)
    throw NumericalError("canonical_decompose: Kossakowski eigendecomposition failed");

  CanonicalGenerator cg;
  cg.time = time;
  cg.hamiltonian_part = h;
  cg.symmetrization_residual = sym_residual;
  // descending rate order
  for (Index e = n - 2; e >= 0; --e) {
    cg.rates.push_back(eig.eigenvalues()(e));
    CMat op = CMat::Zero(k, k);
    for (Index i = 0; i < n - 1; ++i)
      op += eig.eigenvectors()(i, e) * f[i + 1];
    cg.lindblad_ops.push_back(std::move(op));
  }
  cg.reassembly_residual =
      (canonical_reassemble(cg, k).m - generator.m).cwiseAbs().maxCoeff();
  if (cg.reassembly_residual > tol_gen)
    throw InvariantViolation("canonical_decompose: reassembly residual above tolerance (input not of generator form)");
  return cg;
}

Superoperator canonical_reassemble(const CanonicalGenerator& cg, Index dim) {
  const CMat id = CMat::Identity(dim, dim);
  CMat s = CMat::Zero(dim * dim, dim * dim);
  if (cg.hamiltonian_part.size() > 0) {
    s += cplx(0, -1) * (tensor_product(id, cg.hamiltonian_part) -
                        tensor_product(cg.hamiltonian_part.transpose(), id));
  }
  for (size_t k = 0; k < cg.rates.size(); ++k) {
    const CMat& l = cg.lindblad_ops[k];
    const CMat ldl = l.adjoint() * l;
    s += cg.rates[k] *
         (tensor_product(l.conjugate(), l) -
          0.5 * (tensor_product(id, ldl) + tensor_product(ldl.transpose(), id)));
  }
  return Superoperator{std::move(s), dim, dim};
}

double pauli_convention_rate(double hs_rate, Index dim) {
  if (dim <= 0) throw DimensionError("pauli_convention_rate: bad dimension");
  return hs_rate / static_cast<double>(dim);
}

}  // namespace nmsim
