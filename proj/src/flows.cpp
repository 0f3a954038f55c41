#include "conewalk/flows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace conewalk {

MonotoneResult monotone_iterate(const FeFunction& start, bool ascending,
                                const NonlinearitySpec& spec, const MonotoneConfig& cfg) {
  MonotoneResult out;
  FeFunction u = start;
  FeFunction warm;
  const double dir = ascending ? 1.0 : -1.0;
  for (int k = 0; k < cfg.max_steps; ++k) {
    KResult kr;
    try {
      kr = k_apply(u, spec, cfg.newton, warm);
    } catch (const SolverError& e) {
      throw FlowError(FlowError::Kind::Solver, std::string("K solve failed: ") + e.what(), u);
    }
    const FeFunction& next = kr.v;
    double viol = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      viol = std::max(viol, dir * (u[i] - next[i]));
    }
    out.max_violation = std::max(out.max_violation, viol);
    if (viol > cfg.monotone_tol * (1.0 + u.sup_norm())) {
      throw FlowError(FlowError::Kind::NonMonotone,
                      fmt::format("monotone iteration reversed by {:.3e} at step {}; h(x,.) is "
                                  "likely not monotone for this M",
                                  viol, k + 1),
                      u);
    }
    const double step = w1p_norm(next - u, spec.p);
    out.step_norms.push_back(step);
    warm = next;
    u = next;
    out.steps = k + 1;
    if (step <= cfg.step_tol * (1.0 + w1p_norm(u, spec.p))) {
      out.u = u;
      out.residual = residual(u, spec, cfg.newton.parallel).dual_norm;
      return out;
    }
  }
  throw FlowError(FlowError::Kind::MaxSteps, "monotone iteration exceeded its step budget", u);
}

void FlowConfig::validate() const {
  if (dt < 0.0 || !(dt_max > 0.0) || !(dt_min > 0.0) || max_steps < 0 || grow_after < 1) {
    throw ParameterError("FlowConfig: invalid step settings");
  }
  if (!(smoothing > 0.0)) {
    throw ParameterError("FlowConfig: smoothing width must be positive");
  }
  if (std::isfinite(level) && !(band > smoothing)) {
    throw ParameterError("FlowConfig: the energy band must exceed the smoothing width");
  }
  for (const auto& c : constraints) {
    if (!(c.radius > smoothing)) {
      throw ParameterError("FlowConfig: constraint radius must exceed the smoothing width");
    }
  }
}

std::string to_string(FlowStop s) {
  switch (s) {
    case FlowStop::Critical:
      return "critical";
    case FlowStop::LeftRegion:
      return "left_region";
    case FlowStop::MaxSteps:
      return "max_steps";
    case FlowStop::Stalled:
      return "stalled";
  }
  return "unknown";
}

double flow_cutoff(const FlowConfig& cfg, double J, const std::vector<double>& dist) {
  const auto ramp = [&](double x) { return std::clamp(x / cfg.smoothing, 0.0, 1.0); };
  double chi = 1.0;
  if (std::isfinite(cfg.level)) {
    chi *= ramp(cfg.band - std::abs(J - cfg.level));
  }
  for (const auto& c : cfg.constraints) {
    const double d = dist.at(static_cast<std::size_t>(c.cone));
    chi *= c.inside ? ramp(c.radius - d) : ramp(d - c.radius);
  }
  return chi;
}

FlowResult descent_flow(const FeFunction& u0, const std::vector<ConeSpec>& cones,
                        const FlowConfig& cfg, const NonlinearitySpec& spec,
                        const FeFunction& warm) {
  cfg.validate();
  if (!u0.dirichlet_zero(1e-14)) {
    throw ParameterError("descent_flow requires u0 = 0 on the boundary");
  }
  const auto distances = [&](const FeFunction& u) {
    std::vector<double> d;
    d.reserve(cones.size());
    for (const auto& c : cones) {
      d.push_back(cone_distance(u, c));
    }
    return d;
  };
  const auto apply_k = [&](const FeFunction& u, const FeFunction& seed) {
    try {
      return k_apply(u, spec, cfg.newton, seed);
    } catch (const SolverError& e) {
      throw FlowError(FlowError::Kind::Solver, std::string("K solve failed: ") + e.what(), u);
    }
  };

  FlowResult out;
  FeFunction u = u0;
  KResult kr = apply_k(u, warm);
  double J = energy(u, spec, cfg.newton.parallel);
  std::vector<double> dist = distances(u);
  double chi = flow_cutoff(cfg, J, dist);
  double t = 0.0;
  out.trace.push_back({t, J, kr.pg_norm, dist, chi});
  if (cfg.on_step) {
    cfg.on_step(u, out.trace.back());
  }

  double dt = cfg.dt > 0.0 ? cfg.dt
                           : 0.1 * (cfg.constraints.empty() ? 1.0 : cfg.constraints[0].radius);
  dt = std::min(dt, cfg.dt_max);
  int streak = 0;
  double rho = std::numeric_limits<double>::infinity();
  while (true) {
    if (kr.pg_norm <= cfg.pg_tol) {
      out.stop = FlowStop::Critical;
      break;
    }
    if (chi == 0.0) {
      out.stop = FlowStop::LeftRegion;
      break;
    }
    if (out.accepted >= cfg.max_steps) {
      out.stop = FlowStop::MaxSteps;
      break;
    }
    // The step never passes K(u): u - s (u - K u) with s <= 1.
    const double h = std::min(dt, kr.pg_norm);
    FeFunction trial = u - kr.pg * (h * chi / kr.pg_norm);
    const double Jt = energy(trial, spec, cfg.newton.parallel);
    bool ok = std::isfinite(Jt) && Jt <= J;
    for (const auto& g : cfg.guards) {
      ok = ok && cone_distance(trial, cones.at(static_cast<std::size_t>(g.cone))) <= g.radius;
    }
    if (!ok) {
      ++out.rejected;
      streak = 0;
      dt *= 0.5;
      if (dt < cfg.dt_min) {
        out.stop = FlowStop::Stalled;
        break;
      }
      continue;
    }
    if (chi == 1.0) {
      rho = std::min(rho, (J - Jt) / h);
    }
    kr = apply_k(trial, kr.v);
    u = std::move(trial);
    J = Jt;
    t += h;
    dist = distances(u);
    chi = flow_cutoff(cfg, J, dist);
    out.trace.push_back({t, J, kr.pg_norm, dist, chi});
    if (cfg.on_step) {
      cfg.on_step(u, out.trace.back());
    }
    ++out.accepted;
    if (++streak >= cfg.grow_after) {
      dt = std::min(2.0 * dt, cfg.dt_max);
      streak = 0;
    }
  }
  out.u = u;
  out.dt = dt;
  out.k_value = kr.v;
  out.rho_empirical = std::isfinite(rho) ? rho : 0.0;
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<FlowRow>& trace) {
  const std::size_t ncones = trace.empty() ? 0 : trace.front().dist.size();
  os << "t,J,pg_norm";
  for (std::size_t k = 0; k < ncones; ++k) {
    os << ",dist_cone_" << (k + 1);
  }
  os << ",chi\n";
  for (const auto& r : trace) {
    os << fmt::format("{:.15e},{:.15e},{:.15e}", r.t, r.J, r.pg_norm);
    for (double d : r.dist) {
      os << fmt::format(",{:.15e}", d);
    }
    os << fmt::format(",{:.15e}\n", r.chi);
  }
}

void write_trace_csv(const std::string& path, const std::vector<FlowRow>& trace) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path);
  }
  write_trace_csv(os, trace);
}

}  // namespace conewalk
