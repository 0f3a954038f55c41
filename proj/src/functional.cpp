#include "conewalk/functional.hpp"

#include "conewalk/kernels.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conewalk {

void NewtonConfig::validate() const {
  if (!(eps_reg > 0.0) || !(eps_min > 0.0) || !(tolerance > 0.0)) {
    throw ParameterError("NewtonConfig needs eps_reg, eps_min, tolerance > 0");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0) || !(armijo_c > 0.0 && armijo_c < 0.5)) {
    throw ParameterError("NewtonConfig Armijo parameters out of range");
  }
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double grad_energy(bool par, const Mesh& mesh, std::span<const double> u, double p,
                   double eps) {
  return par ? kernels::parallel::gradient_energy(mesh, u, p, eps)
             : kernels::serial::gradient_energy(mesh, u, p, eps);
}

void flux_res(bool par, const Mesh& mesh, std::span<const double> u, double p, double eps,
              std::span<double> out) {
  if (par) {
    kernels::parallel::flux_residual(mesh, u, p, eps, out);
  } else {
    kernels::serial::flux_residual(mesh, u, p, eps, out);
  }
}

SpMat flux_jac(bool par, const Mesh& mesh, std::span<const double> u, double p, double eps) {
  SpMat J = mesh.pattern().skeleton;
  std::span<double> vals(J.valuePtr(), static_cast<std::size_t>(J.nonZeros()));
  if (par) {
    kernels::parallel::flux_jacobian(mesh, u, p, eps, vals);
  } else {
    kernels::serial::flux_jacobian(mesh, u, p, eps, vals);
  }
  return J;
}

void add_diagonal(SpMat& J, const Eigen::VectorXd& d) {
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    J.coeffRef(i, i) += d[i];
  }
}

double interior_norm(const Mesh& mesh, std::span<const double> r) {
  double s = 0.0;
  for (int node : mesh.interior_nodes()) {
    s += r[node] * r[node];
  }
  return std::sqrt(s);
}

// Regularized zero-order potential ((v^2+eps^2)^(p/2) - eps^p)/p and derivatives.
double psi(double v, double p, double eps) {
  if (eps == 0.0) {
    return std::pow(std::abs(v), p) / p;
  }
  const double e2 = eps * eps;
  return std::pow(e2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(v * v / e2)) / p;
}

double dpsi(double v, double p, double eps) {
  if (eps == 0.0) {
    return phi_p(v, p);
  }
  return std::pow(v * v + eps * eps, 0.5 * (p - 2.0)) * v;
}

double ddpsi(double v, double p, double eps) {
  const double s = v * v + eps * eps;
  if (s == 0.0) {
    return p > 2.0 ? 0.0 : (p == 2.0 ? 1.0 : 1e300);
  }
  return std::pow(s, 0.5 * (p - 4.0)) * (eps * eps + (p - 1.0) * v * v);
}

// Energy, gradient and Hessian of the (regularized) monotone problem.
struct MonotoneProblem {
  const Mesh& mesh;
  std::vector<double> mb;  // lumped load m_i b_i
  double p;
  double M;
  bool par;

  double energy(std::span<const double> v, double eps) const {
    const auto mass = mesh.lumped_mass();
    double e = grad_energy(par, mesh, v, p, eps);
    for (int node : mesh.interior_nodes()) {
      e += M * mass[node] * psi(v[node], p, eps) - mb[node] * v[node];
    }
    return e;
  }

  void gradient(std::span<const double> v, double eps, std::vector<double>& g) const {
    g.assign(mesh.num_nodes(), 0.0);
    flux_res(par, mesh, v, p, eps, g);
    const auto mass = mesh.lumped_mass();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (mesh.is_boundary(i)) {
        g[i] = 0.0;
      } else {
        g[i] += M * mass[i] * dpsi(v[i], p, eps) - mb[i];
      }
    }
  }

  SpMat hessian(std::span<const double> v, double eps) const {
    SpMat H = flux_jac(par, mesh, v, p, eps);
    if (M > 0.0) {
      const auto mass = mesh.lumped_mass();
      Eigen::VectorXd d(static_cast<Eigen::Index>(mesh.num_dofs()));
      const auto interior = mesh.interior_nodes();
      for (std::size_t k = 0; k < interior.size(); ++k) {
        d[static_cast<Eigen::Index>(k)] = M * mass[interior[k]] * ddpsi(v[interior[k]], p, eps);
      }
      add_diagonal(H, d);
    }
    return H;
  }
};

struct StepOutcome {
  bool accepted = false;
  double step = 0.0;
};

}  // namespace

double dual_norm_surrogate(const Mesh& mesh, std::span<const double> r, double p) {
  const double pprime = p / (p - 1.0);
  return std::pow(mesh.h(), mesh.dimension() / pprime) * interior_norm(mesh, r);
}

Eigen::VectorXd gather_interior(const Mesh& mesh, std::span<const double> u) {
  const auto interior = mesh.interior_nodes();
  Eigen::VectorXd x(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) {
    x[static_cast<Eigen::Index>(k)] = u[interior[k]];
  }
  return x;
}

void scatter_interior(const Mesh& mesh, const Eigen::VectorXd& x, std::span<double> u) {
  const auto interior = mesh.interior_nodes();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    u[interior[k]] = x[static_cast<Eigen::Index>(k)];
  }
}

double dirichlet_energy(const FeFunction& u, double p, bool parallel) {
  return p * grad_energy(parallel, u.mesh(), u.values(), p, 0.0);
}

double energy(const FeFunction& u, const NonlinearitySpec& spec, bool parallel) {
  const Mesh& mesh = u.mesh();
  const auto mass = mesh.lumped_mass();
  const auto nodes = mesh.nodes();
  double e = grad_energy(parallel, mesh, u.values(), spec.p, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!mesh.is_boundary(i)) {
      e -= mass[i] * spec.F(nodes[i], u[i]);
    }
  }
  return e;
}

Residual residual(const FeFunction& u, const NonlinearitySpec& spec, bool parallel) {
  const Mesh& mesh = u.mesh();
  Residual r;
  r.values.assign(mesh.num_nodes(), 0.0);
  flux_res(parallel, mesh, u.values(), spec.p, 0.0, r.values);
  const auto mass = mesh.lumped_mass();
  const auto nodes = mesh.nodes();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mesh.is_boundary(i)) {
      r.values[i] = 0.0;
    } else {
      r.values[i] -= mass[i] * spec.f(nodes[i], u[i]);
    }
  }
  r.dual_norm = dual_norm_surrogate(mesh, r.values, spec.p);
  return r;
}

std::vector<double> monotone_residual(const FeFunction& v, const FeFunction& load, double p,
                                      double M, bool parallel) {
  const Mesh& mesh = v.mesh();
  MonotoneProblem prob{mesh, {}, p, M, parallel};
  prob.mb.assign(mesh.num_nodes(), 0.0);
  const auto mass = mesh.lumped_mass();
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    prob.mb[i] = mass[i] * load[i];
  }
  std::vector<double> g;
  prob.gradient(v.values(), 0.0, g);
  return g;
}

namespace {

// One damped Newton step on E_eps using Hessian at eps_h (eps_h = eps except in the
// polish, where eps = 0 and eps_h is a small positive number).
// Accepts on Armijo decrease of the energy, or on a decrease of the gradient norm
// once the energy differences fall below rounding.
bool newton_step(const MonotoneProblem& prob, std::vector<double>& v, double eps, double eps_h,
                 const NewtonConfig& cfg, Eigen::SimplicialLDLT<SpMat>& solver, bool& analyzed,
                 double& decrement) {
  const Mesh& mesh = prob.mesh;
  std::vector<double> g;
  prob.gradient(v, eps, g);
  const double e0 = prob.energy(v, eps);
  const double gnorm0 = interior_norm(mesh, g);
  SpMat H = prob.hessian(v, eps_h);
  if (!analyzed) {
    solver.analyzePattern(H);
    analyzed = true;
  }
  solver.factorize(H);
  if (solver.info() != Eigen::Success) {
    return false;
  }
  const Eigen::VectorXd gi = gather_interior(mesh, g);
  const Eigen::VectorXd d = -solver.solve(gi);
  if (solver.info() != Eigen::Success || !d.allFinite()) {
    return false;
  }
  const double slope = gi.dot(d);
  decrement = -slope;
  if (!(slope < 0.0)) {
    return false;
  }
  std::vector<double> trial = v;
  std::vector<double> gt;
  double s = 1.0;
  for (int k = 0; k <= cfg.max_backtracks; ++k) {
    const auto interior = mesh.interior_nodes();
    for (std::size_t j = 0; j < interior.size(); ++j) {
      trial[interior[j]] = v[interior[j]] + s * d[static_cast<Eigen::Index>(j)];
    }
    const double et = prob.energy(trial, eps);
    bool ok = std::isfinite(et) && et <= e0 + cfg.armijo_c * s * slope;
    if (!ok && std::isfinite(et) && std::abs(et - e0) <= 1e-13 * (1.0 + std::abs(e0))) {
      prob.gradient(trial, eps, gt);
      ok = interior_norm(mesh, gt) <= (1.0 - cfg.armijo_c * s) * gnorm0;
    }
    if (ok) {
      v = trial;
      return true;
    }
    s *= cfg.backtrack;
  }
  return false;
}

}  // namespace

MonotoneSolve solve_monotone_full(const FeFunction& load, double p, double M,
                                  const NewtonConfig& cfg, const FeFunction& warm,
                                  const FeFunction& boundary) {
  cfg.validate();
  if (M < 0.0) {
    throw ParameterError("solve_monotone requires M >= 0");
  }
  if (!(p > 1.0)) {
    throw ParameterError("solve_monotone requires p > 1");
  }
  const MeshPtr& meshp = load.mesh_ptr();
  const Mesh& mesh = *meshp;
  MonotoneProblem prob{mesh, {}, p, M, cfg.parallel};
  prob.mb.assign(mesh.num_nodes(), 0.0);
  const auto mass = mesh.lumped_mass();
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    prob.mb[i] = mesh.is_boundary(i) ? 0.0 : mass[i] * load[i];
  }
  const double target = cfg.tolerance * (1.0 + dual_norm_surrogate(mesh, prob.mb, p));

  // Boundary lift: prescribed boundary values, zero interior.
  std::vector<double> lift(mesh.num_nodes(), 0.0);
  if (!boundary.empty()) {
    for (std::size_t i = 0; i < lift.size(); ++i) {
      if (mesh.is_boundary(i)) {
        lift[i] = boundary[i];
      }
    }
  }

  MonotoneSolve out;
  std::vector<double> v = lift;
  std::vector<double> g;
  int iters = 0;

  const auto record = [&](double eps) {
    prob.gradient(v, 0.0, g);
    const double res = dual_norm_surrogate(mesh, g, p);
    out.history.push_back({iters, res, prob.energy(v, 0.0), eps});
    return res;
  };

  if (p == 2.0) {
    // Linear problem: one symmetric factorization.
    SpMat H = prob.hessian(v, 0.0);
    Eigen::SimplicialLDLT<SpMat> solver(H);
    if (solver.info() != Eigen::Success) {
      throw SolverError("factorization failed", FeFunction(meshp, v), out.history);
    }
    // Two Newton steps from the lift; the second removes the factorization's rounding.
    for (int k = 0; k < 2; ++k) {
      prob.gradient(v, 0.0, g);
      const Eigen::VectorXd dx = solver.solve(gather_interior(mesh, g));
      scatter_interior(mesh, gather_interior(mesh, v) - dx, v);
    }
    iters = 1;
    out.residual = record(0.0);
    out.iterations = iters;
    out.v = FeFunction(meshp, v);
    if (!(out.residual <= target)) {
      throw SolverError("linear solve missed the tolerance", out.v, out.history);
    }
    return out;
  }

  Eigen::SimplicialLDLT<SpMat> solver;
  bool analyzed = false;
  const double eps_polish = std::min(cfg.eps_min, 1e-10);

  // Newton on the unregularized problem from the current v.
  const auto polish = [&](int budget) {
    for (int k = 0; k < budget && iters < cfg.max_iterations; ++k) {
      const double res = record(0.0);
      if (res <= target) {
        return true;
      }
      double dec = 0.0;
      if (!newton_step(prob, v, 0.0, eps_polish, cfg, solver, analyzed, dec)) {
        return record(0.0) <= target;
      }
      ++iters;
    }
    return record(0.0) <= target;
  };

  if (!warm.empty()) {
    std::copy(warm.values().begin(), warm.values().end(), v.begin());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (mesh.is_boundary(i)) {
        v[i] = lift[i];
      }
    }
    if (polish(25)) {
      out.v = FeFunction(meshp, v);
      out.residual = out.history.back().residual;
      out.iterations = iters;
      return out;
    }
    v = lift;
  }

  double eps = cfg.eps_reg;
  bool done = false;
  while (!done) {
    for (int k = 0; k < 50 && iters < cfg.max_iterations; ++k) {
      double dec = 0.0;
      const double e_before = prob.energy(v, eps);
      if (!newton_step(prob, v, eps, eps, cfg, solver, analyzed, dec)) {
        break;
      }
      ++iters;
      if (dec <= 1e-13 * (1.0 + std::abs(e_before))) {
        break;
      }
    }
    record(eps);
    if (iters >= cfg.max_iterations) {
      break;
    }
    const bool last = eps <= cfg.eps_min;
    if (eps <= 1e-4 || last) {
      const std::vector<double> keep = v;
      if (polish(last ? cfg.max_iterations : 25)) {
        done = true;
        break;
      }
      if (last) {
        break;
      }
      v = keep;
    }
    eps *= 0.5;
  }
  out.v = FeFunction(meshp, v);
  out.residual = record(0.0);
  out.iterations = iters;
  if (!done && !(out.residual <= target)) {
    throw SolverError("solve_monotone did not converge", out.v, out.history);
  }
  return out;
}

FeFunction solve_monotone(const FeFunction& load, double p, double M, const NewtonConfig& cfg) {
  return solve_monotone_full(load, p, M, cfg).v;
}

NewtonResult newton_solve(const FeFunction& u0, const NonlinearitySpec& spec,
                          const NewtonConfig& cfg, double tolerance, int max_iterations,
                          const std::function<bool(const FeFunction&)>& on_iterate) {
  const MeshPtr& meshp = u0.mesh_ptr();
  const Mesh& mesh = *meshp;
  const double p = spec.p;
  const auto mass = mesh.lumped_mass();
  const auto nodes = mesh.nodes();
  const auto interior = mesh.interior_nodes();
  const double eps_j = std::min(cfg.eps_min, 1e-10);

  NewtonResult out;
  FeFunction u = u0;
  Residual r = residual(u, spec, cfg.parallel);
  Eigen::SparseLU<SpMat> lu;
  bool analyzed = false;

  for (int it = 0;; ++it) {
    out.history.push_back({it, r.dual_norm, energy(u, spec, cfg.parallel), eps_j});
    if (r.dual_norm <= tolerance) {
      out.converged = true;
      break;
    }
    if (it >= max_iterations) {
      break;
    }
    SpMat Jm = flux_jac(cfg.parallel, mesh, u.values(), p, eps_j);
    Eigen::VectorXd d(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const int node = interior[k];
      double fp = spec.df_of(nodes[node], u[node]);
      if (!std::isfinite(fp)) {
        fp = spec.df_of(nodes[node], std::copysign(1e-12, u[node] == 0.0 ? 1.0 : u[node]));
      }
      d[static_cast<Eigen::Index>(k)] = -mass[node] * fp;
    }
    add_diagonal(Jm, d);
    if (!analyzed) {
      lu.analyzePattern(Jm);
      analyzed = true;
    }
    lu.factorize(Jm);
    if (lu.info() != Eigen::Success) {
      break;
    }
    const Eigen::VectorXd step = -lu.solve(gather_interior(mesh, r.values));
    if (!step.allFinite()) {
      break;
    }
    const double phi0 = interior_norm(mesh, r.values);
    double s = 1.0;
    bool accepted = false;
    FeFunction trial = u;
    Residual rt;
    for (int k = 0; k <= cfg.max_backtracks; ++k) {
      for (std::size_t j = 0; j < interior.size(); ++j) {
        trial[interior[j]] = u[interior[j]] + s * step[static_cast<Eigen::Index>(j)];
      }
      rt = residual(trial, spec, cfg.parallel);
      const double phit = interior_norm(mesh, rt.values);
      if (std::isfinite(phit) && phit * phit <= (1.0 - 2.0 * cfg.armijo_c * s) * phi0 * phi0) {
        accepted = true;
        break;
      }
      s *= cfg.backtrack;
    }
    if (!accepted) {
      break;
    }
    u = trial;
    r = rt;
    out.iterations = it + 1;
    if (on_iterate && !on_iterate(u)) {
      out.aborted = true;
      out.history.push_back({it + 1, r.dual_norm, energy(u, spec, cfg.parallel), eps_j});
      break;
    }
  }
  out.u = u;
  out.residual = r.dual_norm;
  return out;
}

}  // namespace conewalk
