#pragma once

#include "conewalk/grid.hpp"
#include "conewalk/problem.hpp"

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

struct NewtonConfig {
  double eps_reg = 1e-1;   // starting regularization
  double eps_min = 1e-9;   // continuation stops once eps <= eps_min
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  int max_iterations = 400;  // total Newton steps across all continuation levels
  double tolerance = 1e-10;  // relative: surrogate <= tolerance * (1 + surrogate(load))
  bool parallel = true;      // use the OpenMP kernels

  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double residual = 0.0;
  double energy = 0.0;
  double epsilon_reg = 0.0;
};

/// Thrown when an iterative solve fails; carries the last iterate.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, FeFunction last, std::vector<TraceRow> history)
      : std::runtime_error(what), last_(std::move(last)), history_(std::move(history)) {}
  const FeFunction& last_iterate() const { return last_; }
  const std::vector<TraceRow>& history() const { return history_; }

 private:
  FeFunction last_;
  std::vector<TraceRow> history_;
};

/// Weak residual J'(u)[phi_i]; one entry per node, zero on the boundary.
struct Residual {
  std::vector<double> values;
  double dual_norm = 0.0;
};

/// h^(N/p') times the Euclidean norm of the interior entries.
double dual_norm_surrogate(const Mesh& mesh, std::span<const double> r, double p);

/// J(u) = sum vol |grad u|^p / p - sum_i m_i F(x_i, u_i).
double energy(const FeFunction& u, const NonlinearitySpec& spec, bool parallel = true);

Residual residual(const FeFunction& u, const NonlinearitySpec& spec, bool parallel = true);

/// Weak form of the monotone operator -Delta_p v + M|v|^(p-2) v tested
/// against every hat function, minus the lumped load m_i b_i.
std::vector<double> monotone_residual(const FeFunction& v, const FeFunction& load, double p,
                                      double M, bool parallel = true);

struct MonotoneSolve {
  FeFunction v;
  std::vector<TraceRow> history;
  double residual = 0.0;  // final dual-norm surrogate
  int iterations = 0;
};

/// Solves -Delta_p v + M|v|^(p-2) v = load (nodal values). v takes the boundary
/// values of `boundary` (zero when empty). `warm` (may be empty) is tried first
/// with an unregularized Newton polish.
MonotoneSolve solve_monotone_full(const FeFunction& load, double p, double M,
                                  const NewtonConfig& cfg, const FeFunction& warm = {},
                                  const FeFunction& boundary = {});

FeFunction solve_monotone(const FeFunction& load, double p, double M, const NewtonConfig& cfg);

struct NewtonResult {
  FeFunction u;
  bool converged = false;
  bool aborted = false;  // the iterate callback asked to stop
  int iterations = 0;
  double residual = 0.0;
  std::vector<TraceRow> history;
};

/// Damped Newton on the full (possibly indefinite) residual of -Delta_p u = f(x,u)
/// with merit ||r||^2; boundary values of u0 are kept. `on_iterate` may veto
/// continuation by returning false.
NewtonResult newton_solve(const FeFunction& u0, const NonlinearitySpec& spec,
                          const NewtonConfig& cfg, double tolerance, int max_iterations = 100,
                          const std::function<bool(const FeFunction&)>& on_iterate = {});

/// Dirichlet energy sum vol |grad u|^p (no 1/p factor).
double dirichlet_energy(const FeFunction& u, double p, bool parallel = true);

/// Interior-dof vector helpers.
Eigen::VectorXd gather_interior(const Mesh& mesh, std::span<const double> u);
void scatter_interior(const Mesh& mesh, const Eigen::VectorXd& x, std::span<double> u);

}  // namespace conewalk
