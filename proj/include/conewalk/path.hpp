#pragma once

#include "conewalk/grid.hpp"

#include <vector>

namespace conewalk {

/// Settings shared by the path-based min-max searches.
struct MinmaxConfig {
  int m = 41;                  // path nodes, odd, >= 5
  int max_outer = 400;         // outer iterations
  int inner_flow_steps = 4;    // descent steps per S_gamma node per outer iteration
  double level_tol = 1e-10;    // relative level change regarded as stagnation
  double eps_bar = 0.0;        // enlargement radius (mountain pass only)
  double tau = 0.2;            // node step damping
  bool climbing = true;        // climbing image at the max node
  double pg_switch = 1e-4;     // pg_norm at the max node that triggers Newton refinement
  int newton_every = 10;       // outer iterations between early refinement attempts (0: none)
  bool parallel = true;

  void validate() const;
};

/// Cumulative W^{1,p} arc length of a discrete path (first entry 0).
std::vector<double> arc_lengths(const std::vector<FeFunction>& path, double p);

/// Redistributes interior nodes to equal W^{1,p} spacing by piecewise-linear
/// interpolation along the current polygon; endpoints are kept.
void reparametrize(std::vector<FeFunction>& path, double p);

}  // namespace conewalk
