#pragma once

#include "conewalk/functional.hpp"

namespace conewalk {

struct KResult {
  FeFunction v;        // K(u)
  FeFunction pg;       // u - K(u)
  double pg_norm = 0;  // W^{1,p} norm of pg
  double inner = 0;    // J'(u)[u - K(u)]
  bool fixed_point = false;
};

/// Fixed-point tolerance 1e-8 (1 + ||u||).
double fixed_point_tolerance(const FeFunction& u, double p);

/// Nodal load h(x_i, u_i) = f(x_i, u_i) + M |u_i|^(p-2) u_i.
FeFunction k_load(const FeFunction& u, const NonlinearitySpec& spec);

/// v = K(u) solves -Delta_p v + M|v|^(p-2) v = h(x, u) with v = 0 on the boundary;
/// boundary values of u do not enter. `warm` seeds the solver.
KResult k_apply(const FeFunction& u, const NonlinearitySpec& spec, const NewtonConfig& cfg,
                const FeFunction& warm = {});

}  // namespace conewalk
