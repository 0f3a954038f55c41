#include "conewalk/koperator.hpp"

namespace conewalk {

double fixed_point_tolerance(const FeFunction& u, double p) {
  return 1e-8 * (1.0 + w1p_norm(u, p));
}

FeFunction k_load(const FeFunction& u, const NonlinearitySpec& spec) {
  FeFunction b(u.mesh_ptr());
  const auto nodes = u.mesh().nodes();
  for (std::size_t i = 0; i < u.size(); ++i) {
    b[i] = h_eval(spec, nodes[i], u[i]);
  }
  return b;
}

KResult k_apply(const FeFunction& u, const NonlinearitySpec& spec, const NewtonConfig& cfg,
                const FeFunction& warm) {
  KResult out;
  out.v = solve_monotone_full(k_load(u, spec), spec.p, spec.M, cfg, warm).v;
  out.pg = u - out.v;
  out.pg_norm = w1p_norm(out.pg, spec.p);
  const Residual r = residual(u, spec, cfg.parallel);
  double inner = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    inner += r.values[i] * out.pg[i];
  }
  out.inner = inner;
  out.fixed_point = out.pg_norm <= fixed_point_tolerance(u, spec.p);
  return out;
}

}  // namespace conewalk
