#pragma once

#include "conewalk/grid.hpp"
#include "conewalk/path.hpp"

#include <vector>

namespace conewalk {

struct EigenResult {
  double p = 2.0;
  double lambda1 = 0.0;
  FeFunction phi1;  // positive, lumped L^p norm 1
  int iterations1 = 0;
  int restarts1 = 0;
  double lambda2 = 0.0;
  std::vector<FeFunction> lambda2_path;
  int iterations2 = 0;
  int max_node = 0;            // index of the max node on the final lambda2 path
  double hopf_margin = 0.0;    // min over boundary-adjacent nodes of phi1 / dist
};

/// Rayleigh quotient sum vol |grad u|^p / sum m_i |u_i|^p.
double rayleigh_quotient(const FeFunction& u, double p, bool parallel = true);

/// Scales u to unit lumped L^p norm.
FeFunction normalize_lp(const FeFunction& u, double p);

struct Lambda1Result {
  double lambda1 = 0.0;
  FeFunction phi1;
  int iterations = 0;
  int restarts = 0;
};

/// Preconditioned descent on the Rayleigh quotient from `start` (default: the
/// boundary-distance interpolant), renormalized on the lumped L^p sphere.
Lambda1Result lambda1(double p, const MeshPtr& mesh, double tol = 1e-10,
                      const FeFunction& start = {}, int max_iterations = 5000);

struct Lambda2Result {
  double lambda2 = 0.0;
  std::vector<FeFunction> path;
  int iterations = 0;
  int max_node = 0;
};

/// String method on the L^p sphere between -phi1 and phi1. With
/// cfg.max_outer = 0 the initial path is only evaluated (an upper bound).
Lambda2Result lambda2(double p, const MeshPtr& mesh, const FeFunction& phi1,
                      const MinmaxConfig& cfg);

double hopf_margin(const FeFunction& phi1);

/// lambda1, then lambda2 and the Hopf margin.
EigenResult eigen_solve(double p, const MeshPtr& mesh, const MinmaxConfig& cfg,
                        double tol = 1e-10);

}  // namespace conewalk
