#include "conewalk/eigen.hpp"

#include "conewalk/functional.hpp"
#include "conewalk/kernels.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conewalk {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double lumped_power(const FeFunction& u, double p) {
  const auto mass = u.mesh().lumped_mass();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += mass[i] * std::pow(std::abs(u[i]), p);
  }
  return s;
}

struct RayleighState {
  double R = 0.0;
  Eigen::VectorXd grad;  // interior gradient of R
  SpMat P;               // preconditioner p * J_eps(u) / L
};

RayleighState rayleigh_state(const FeFunction& u, double p, bool par, double eps_rel = 1e-3) {
  const Mesh& mesh = u.mesh();
  RayleighState st;
  const double D = p * (par ? kernels::parallel::gradient_energy(mesh, u.values(), p)
                            : kernels::serial::gradient_energy(mesh, u.values(), p));
  const double L = lumped_power(u, p);
  st.R = D / L;
  std::vector<double> flux(mesh.num_nodes());
  if (par) {
    kernels::parallel::flux_residual(mesh, u.values(), p, 0.0, flux);
  } else {
    kernels::serial::flux_residual(mesh, u.values(), p, 0.0, flux);
  }
  const auto mass = mesh.lumped_mass();
  const auto interior = mesh.interior_nodes();
  st.grad.resize(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const int i = interior[k];
    st.grad[static_cast<Eigen::Index>(k)] =
        p * (flux[i] - st.R * mass[i] * phi_p(u[i], p)) / L;
  }
  const double eps = eps_rel * std::pow(D / mesh.domain().measure(), 1.0 / p);
  st.P = mesh.pattern().skeleton;
  std::span<double> vals(st.P.valuePtr(), static_cast<std::size_t>(st.P.nonZeros()));
  if (par) {
    kernels::parallel::flux_jacobian(mesh, u.values(), p, p == 2.0 ? 0.0 : eps, vals);
  } else {
    kernels::serial::flux_jacobian(mesh, u.values(), p, p == 2.0 ? 0.0 : eps, vals);
  }
  st.P *= p / L;
  return st;
}

Eigen::VectorXd solve_spd(const SpMat& P, const Eigen::VectorXd& rhs) {
  Eigen::SimplicialLDLT<SpMat> solver(P);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("preconditioner factorization failed");
  }
  return solver.solve(rhs);
}

FeFunction with_step(const FeFunction& u, const Eigen::VectorXd& d, double s) {
  FeFunction out = u;
  const auto interior = u.mesh().interior_nodes();
  for (std::size_t k = 0; k < interior.size(); ++k) {
    out[interior[k]] += s * d[static_cast<Eigen::Index>(k)];
  }
  return out;
}

}  // namespace

double rayleigh_quotient(const FeFunction& u, double p, bool parallel) {
  const double L = lumped_power(u, p);
  if (L == 0.0) {
    throw ParameterError("Rayleigh quotient of the zero function");
  }
  return dirichlet_energy(u, p, parallel) / L;
}

FeFunction normalize_lp(const FeFunction& u, double p) {
  const double n = lumped_ls_norm(u, p);
  if (n == 0.0) {
    throw ParameterError("cannot normalize the zero function");
  }
  return u * (1.0 / n);
}

Lambda1Result lambda1(double p, const MeshPtr& mesh, double tol, const FeFunction& start,
                      int max_iterations) {
  if (!(p > 1.0)) {
    throw ParameterError("lambda1 requires p > 1");
  }
  Lambda1Result out;
  FeFunction u = start.empty() ? FeFunction(mesh, std::vector<double>(mesh->boundary_distance().begin(),
                                                                       mesh->boundary_distance().end()))
                               : start;
  u.clear_boundary();
  u = normalize_lp(u, p);
  int quiet = 0;
  for (int it = 0; it < max_iterations; ++it) {
    const RayleighState st = rayleigh_state(u, p, true, 0.1);
    const Eigen::VectorXd d = -solve_spd(st.P, st.grad);
    const double slope = st.grad.dot(d);
    if (!(slope < 0.0)) {
      out.iterations = it;
      break;
    }
    double s = 1.0;
    FeFunction trial = u;
    double Rt = st.R;
    bool accepted = false;
    for (int k = 0; k <= 60; ++k) {
      trial = with_step(u, d, s);
      Rt = rayleigh_quotient(trial, p);
      if (std::isfinite(Rt) && Rt <= st.R + 1e-4 * s * slope) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    out.iterations = it + 1;
    if (!accepted) {
      break;
    }
    if (trial.min() < 0.0) {
      for (double& v : trial.data()) {
        v = std::abs(v);
      }
      ++out.restarts;
      Rt = rayleigh_quotient(trial, p);
    }
    u = normalize_lp(trial, p);
    const double step_norm = s * w1p_norm(with_step(FeFunction(mesh), d, 1.0), p);
    if (st.R - Rt <= tol * Rt && step_norm <= 1e-7) {
      if (++quiet >= 2) {
        break;
      }
    } else {
      quiet = 0;
    }
  }
  out.lambda1 = rayleigh_quotient(u, p);
  out.phi1 = u;
  return out;
}

double hopf_margin(const FeFunction& phi1) {
  const Mesh& mesh = phi1.mesh();
  const auto dist = mesh.boundary_distance();
  double margin = std::numeric_limits<double>::infinity();
  for (const Element& el : mesh.elements()) {
    bool touches = false;
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      touches = touches || mesh.is_boundary(el.nodes[a]);
    }
    if (!touches) {
      continue;
    }
    for (int a = 0; a < mesh.nodes_per_element(); ++a) {
      const int n = el.nodes[a];
      if (!mesh.is_boundary(n)) {
        margin = std::min(margin, phi1[n] / dist[n]);
      }
    }
  }
  return margin;
}

namespace {

// Reparametrizes each side of an anchored node separately.
void reparametrize_anchored(std::vector<FeFunction>& path, double p, int anchor) {
  if (anchor <= 0 || anchor >= static_cast<int>(path.size()) - 1) {
    reparametrize(path, p);
    return;
  }
  std::vector<FeFunction> left(path.begin(), path.begin() + anchor + 1);
  std::vector<FeFunction> right(path.begin() + anchor, path.end());
  reparametrize(left, p);
  reparametrize(right, p);
  for (int k = 0; k <= anchor; ++k) {
    path[k] = left[k];
  }
  for (std::size_t k = 0; k < right.size(); ++k) {
    path[anchor + k] = right[k];
  }
}

}  // namespace

Lambda2Result lambda2(double p, const MeshPtr& mesh, const FeFunction& phi1,
                      const MinmaxConfig& cfg) {
  cfg.validate();
  const int m = cfg.m;
  const double pi = std::acos(-1.0);
  const DomainSpec& dom = mesh->domain();
  const double xc = dom.dimension() == 1 ? 0.5 * (dom.x0 + dom.x1) : 0.5;
  const double len = dom.dimension() == 1 ? dom.x1 - dom.x0 : 1.0;
  FeFunction psi(mesh);
  const auto nodes = mesh->nodes();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    psi[i] = (nodes[i].x - xc) / len * phi1[i];
  }
  psi = normalize_lp(psi, p);

  std::vector<FeFunction> path(m);
  for (int j = 0; j < m; ++j) {
    const double theta = pi * j / (m - 1);
    path[j] = normalize_lp(phi1 * (-std::cos(theta)) + psi * std::sin(theta), p);
  }
  path.front() = phi1 * -1.0;
  path.back() = phi1;

  Lambda2Result out;
  std::vector<double> R(m);
  const auto evaluate = [&]() {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < m; ++j) {
      R[j] = rayleigh_quotient(path[j], p, false);
    }
    return static_cast<int>(std::max_element(R.begin(), R.end()) - R.begin());
  };
  int kmax = evaluate();
  double level = R[kmax];
  int quiet = 0;
  for (int it = 0; it < cfg.max_outer; ++it) {
    std::vector<FeFunction> next = path;
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (int j = 1; j < m - 1; ++j) {
      const RayleighState st = rayleigh_state(path[j], p, false, 0.1);
      Eigen::VectorXd d = -solve_spd(st.P, st.grad);
      const bool climb = cfg.climbing && j == kmax;
      if (climb) {
        const Eigen::VectorXd t = gather_interior(*mesh, (path[j + 1] - path[j - 1]).values());
        const Eigen::VectorXd Pt = st.P * t;
        const double tPt = t.dot(Pt);
        if (tPt > 0.0) {
          d -= 2.0 * (d.dot(Pt) / tPt) * t;
        }
      }
      // Damped step; ordinary nodes must not rise, the climbing node may rise slightly.
      const double cap = climb ? st.R * 1.01 : st.R;
      double s = cfg.tau;
      for (int k = 0; k < 40; ++k) {
        FeFunction trial = normalize_lp(with_step(path[j], d, s), p);
        if (rayleigh_quotient(trial, p, false) <= cap || k == 39) {
          next[j] = std::move(trial);
          break;
        }
        s *= 0.5;
      }
    }
    path = std::move(next);
    reparametrize_anchored(path, p, cfg.climbing ? kmax : -1);
    for (int j = 1; j < m - 1; ++j) {
      path[j] = normalize_lp(path[j], p);
    }
    kmax = evaluate();
    const double new_level = R[kmax];
    out.iterations = it + 1;
    if (std::abs(new_level - level) <= cfg.level_tol * new_level) {
      if (++quiet >= 5) {
        level = new_level;
        break;
      }
    } else {
      quiet = 0;
    }
    level = new_level;
  }
  out.lambda2 = level;
  out.max_node = kmax;
  out.path = std::move(path);
  return out;
}

EigenResult eigen_solve(double p, const MeshPtr& mesh, const MinmaxConfig& cfg, double tol) {
  EigenResult res;
  res.p = p;
  const Lambda1Result l1 = lambda1(p, mesh, tol);
  res.lambda1 = l1.lambda1;
  res.phi1 = l1.phi1;
  res.iterations1 = l1.iterations;
  res.restarts1 = l1.restarts;
  const Lambda2Result l2 = lambda2(p, mesh, res.phi1, cfg);
  res.lambda2 = l2.lambda2;
  res.lambda2_path = l2.path;
  res.iterations2 = l2.iterations;
  res.max_node = l2.max_node;
  res.hopf_margin = hopf_margin(res.phi1);
  return res;
}

}  // namespace conewalk
