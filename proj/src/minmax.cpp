#include "conewalk/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace conewalk {

std::string to_string(MountainPassStatus s) {
  switch (s) {
    case MountainPassStatus::Found:
      return "found";
    case MountainPassStatus::NoSolution:
      return "no_solution";
    case MountainPassStatus::RegionViolation:
      return "region_violation";
  }
  return "unknown";
}

std::string sign_class(const FeFunction& u, double threshold) {
  const bool pos = u.max() > threshold;
  const bool neg = u.min() < -threshold;
  if (pos && neg) {
    return "sign-changing";
  }
  if (pos) {
    return "positive";
  }
  if (neg) {
    return "negative";
  }
  return "zero";
}

double sign_changing_threshold(int N) {
  const double n = N;
  return (n - 2.0 + std::sqrt(9.0 * n * n - 4.0 * n + 4.0)) / (2.0 * n);
}

namespace {

void evaluate_path(PathState& st, const std::vector<ConeSpec>& cones, const NonlinearitySpec& spec,
                   double eps) {
  const int m = static_cast<int>(st.nodes.size());
  st.energies.assign(m, 0.0);
  st.dist.assign(m, {});
  st.in_s.assign(m, 0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < m; ++j) {
    st.energies[j] = energy(st.nodes[j], spec, false);
    for (int c = 0; c < 4; ++c) {
      st.dist[j][c] = cone_distance(st.nodes[j], cones[c]);
    }
  }
  st.max_node = -1;
  st.level = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    st.in_s[j] = st.dist[j][2] > eps && st.dist[j][1] > eps;
    if (st.in_s[j] && st.energies[j] > st.level) {
      st.level = st.energies[j];
      st.max_node = j;
    }
  }
}

Localization locate_solution(const FeFunction& u, const ConeQuad& c, double eps) {
  Localization loc;
  loc.dist_alpha1 = cone_distance(u, c.alpha1);
  loc.dist_beta2 = cone_distance(u, c.beta2);
  loc.dist_alpha2 = cone_distance(u, c.alpha2);
  loc.dist_beta1 = cone_distance(u, c.beta1);
  loc.tol = 1e-8 * (1.0 + w1p_norm(u, c.alpha1.p));
  loc.ok = loc.dist_alpha1 <= loc.tol && loc.dist_beta2 <= loc.tol &&
           loc.dist_alpha2 > 0.5 * eps && loc.dist_beta1 > 0.5 * eps;
  return loc;
}

}  // namespace

MountainPassResult mountain_pass(const MountainPassInput& in, const NonlinearitySpec& spec,
                                 const MinmaxConfig& cfg, const NewtonConfig& newton,
                                 const std::function<void(int, const PathState&)>& on_outer) {
  cfg.validate();
  const double eps = cfg.eps_bar;
  if (!(eps > 0.0)) {
    throw ParameterError("mountain_pass needs eps_bar > 0");
  }
  const ConeQuad& C = in.cones;
  if (!C.alpha1.is_sub() || C.beta1.is_sub() || !C.alpha2.is_sub() || C.beta2.is_sub()) {
    throw ParameterError("mountain_pass expects cones (sub, super, sub, super)");
  }
  const Mesh& mesh = in.u1.mesh();
  for (int i : mesh.interior_nodes()) {
    if (!(C.alpha1.vertex[i] < C.beta1.vertex[i]) || !(C.alpha2.vertex[i] < C.beta2.vertex[i])) {
      throw ParameterError("mountain_pass: alpha1 < beta1 and alpha2 < beta2 must hold nodally");
    }
  }
  if (w1p_norm(in.u1 - in.u2, spec.p) == 0.0) {
    throw ParameterError("mountain_pass: u1 = u2, the endpoint cones are not disjoint");
  }
  if (!cones_disjoint(C.alpha2, C.beta1, eps)) {
    throw ParameterError("mountain_pass: cones alpha2 and beta1 are not disjoint at eps_bar");
  }
  const std::vector<ConeSpec> cones = C.as_list();
  const int m = cfg.m;
  const double pi = std::acos(-1.0);

  MountainPassResult out;
  PathState st;
  st.nodes.resize(m);
  for (int j = 0; j < m; ++j) {
    const double s = static_cast<double>(j) / (m - 1);
    st.nodes[j] = in.u1 * (1.0 - s) + in.u2 * s;
    if (!in.bump.empty()) {
      st.nodes[j] += in.bump * std::sin(pi * s);
    }
  }
  st.nodes.front() = in.u1;
  st.nodes.back() = in.u2;
  evaluate_path(st, cones, spec, eps);
  const double j_end = std::max(st.energies.front(), st.energies.back());
  out.lower_bound = std::min(st.energies.front(), st.energies.back());

  FlowConfig fc;
  fc.dt = 0.1 * eps;
  fc.dt_max = eps;
  fc.max_steps = cfg.inner_flow_steps;
  fc.pg_tol = 1e-12;
  fc.newton = newton;
  fc.newton.parallel = false;
  std::vector<double> node_dt(m, fc.dt);
  std::vector<FeFunction> node_k(m);

  // Newton refinement from a path node, guarded to the admissible region.
  const auto in_region = [&](const FeFunction& u) {
    return cone_distance(u, C.alpha1) <= 0.5 * eps && cone_distance(u, C.beta2) <= 0.5 * eps &&
           cone_distance(u, C.alpha2) > 0.5 * eps && cone_distance(u, C.beta1) > 0.5 * eps;
  };
  const auto refine = [&](const FeFunction& start) {
    const NewtonResult nr = newton_solve(start, spec, newton, newton.tolerance, 100, in_region);
    out.newton_iterations = nr.iterations;
    out.u3 = nr.u;
    out.residual = nr.residual;
    out.energy_u3 = energy(nr.u, spec);
    out.location = locate_solution(nr.u, C, eps);
    if (nr.aborted) {
      out.status = MountainPassStatus::RegionViolation;
      out.message = "Newton refinement left the admissible region";
    } else if (!nr.converged) {
      out.status = MountainPassStatus::NoSolution;
      out.message = fmt::format("Newton refinement stalled at residual {:.3e}", nr.residual);
    } else if (!out.location.ok) {
      out.status = MountainPassStatus::RegionViolation;
      out.message = "refined critical point fails the localization check";
    } else if (!(out.energy_u3 > j_end)) {
      out.status = MountainPassStatus::NoSolution;
      out.message = "refined critical point does not exceed the endpoint energies";
    } else {
      out.status = MountainPassStatus::Found;
      out.message.clear();
    }
    return out.status == MountainPassStatus::Found;
  };
  const auto above_ends = [&](double lv) {
    return lv > j_end + 1e-10 * (1.0 + std::abs(j_end));
  };

  double level = st.level;
  out.levels.push_back(level);
  int quiet = 0;
  bool found = false;
  double pg = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_outer; ++it) {
    if (st.max_node < 0) {
      out.status = MountainPassStatus::NoSolution;
      out.message = "the path left S_gamma entirely";
      out.path = st;
      return out;
    }
    std::vector<int> active;
    for (int j = 1; j < m - 1; ++j) {
      if (st.in_s[j]) {
        active.push_back(j);
      }
    }
    const int na = static_cast<int>(active.size());
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (int a = 0; a < na; ++a) {
      const int j = active[a];
      FlowConfig local = fc;
      local.dt = node_dt[j];
      const FlowResult fr = descent_flow(st.nodes[j], cones, local, spec, node_k[j]);
      st.nodes[j] = fr.u;
      node_dt[j] = fr.dt;
      node_k[j] = fr.k_value;
    }
    // Retraction onto the half-enlarged ambient cones.
    for (int j = 1; j < m - 1; ++j) {
      if (cone_distance(st.nodes[j], C.alpha1) > 0.5 * eps) {
        st.nodes[j] = project_plus(st.nodes[j], C.alpha1);
      }
      if (cone_distance(st.nodes[j], C.beta2) > 0.5 * eps) {
        st.nodes[j] = project_plus(st.nodes[j], C.beta2);
      }
    }
    evaluate_path(st, cones, spec, eps);
    // Equal spacing is kept only when it does not raise the level.
    if (st.max_node >= 0) {
      PathState spaced;
      spaced.nodes = st.nodes;
      reparametrize(spaced.nodes, spec.p);
      evaluate_path(spaced, cones, spec, eps);
      if (spaced.max_node >= 0 && spaced.level <= st.level + 1e-10 * (1.0 + std::abs(st.level))) {
        st = std::move(spaced);
        std::fill(node_k.begin(), node_k.end(), FeFunction());
      }
    }
    out.outer_iterations = it + 1;
    if (on_outer) {
      on_outer(it, st);
    }
    if (st.max_node < 0) {
      continue;  // reported at the top of the next iteration
    }
    const double increase = st.level - level;
    out.max_level_increase = std::max(out.max_level_increase, increase);
    if (increase > 1e-10 * (1.0 + std::abs(level))) {
      out.level_monotone = false;
    }
    out.levels.push_back(st.level);
    pg = k_apply(st.nodes[st.max_node], spec, newton).pg_norm;
    const bool flat = std::abs(st.level - level) <= cfg.level_tol * (1.0 + std::abs(st.level));
    level = st.level;
    if (pg <= cfg.pg_switch) {
      break;
    }
    if (cfg.newton_every > 0 && (it + 1) % cfg.newton_every == 0 && above_ends(level) &&
        refine(st.nodes[st.max_node])) {
      found = true;
      break;
    }
    quiet = flat ? quiet + 1 : 0;
    if (quiet >= 5) {
      break;
    }
  }
  out.level = level;
  out.pg_at_switch = pg;
  for (double e : st.energies) {
    out.lower_bound = std::min(out.lower_bound, e);
  }
  out.lower_bound_ok = level >= out.lower_bound;
  out.path = st;
  if (found) {
    return out;
  }
  if (st.max_node < 0 || !above_ends(level)) {
    out.status = MountainPassStatus::NoSolution;
    out.message = "the min-max level collapsed to the endpoint energies";
    return out;
  }
  refine(st.nodes[st.max_node]);
  return out;
}

namespace {

std::vector<Branch> candidate_branches(double p) {
  if (p < 2.0) {
    return {Branch::L1Sub, Branch::SupSub};
  }
  if (p == 2.0) {
    return {Branch::LrSuper};
  }
  return {Branch::LrSuper, Branch::SupSuper, Branch::SupSuperQ};
}

template <class F>
auto stage(const char* tag, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(tag, e.what());
  }
}

}  // namespace

ConeSetup setup_cones(const NonlinearitySpec& spec_in, const MeshPtr& mesh,
                      const FourSolutionsConfig& cfg, const EigenResult* eig_in,
                      bool require_certificates) {
  ConeSetup res;
  const double p = spec_in.p;
  const int N = mesh->dimension();
  res.threshold = sign_changing_threshold(N);
  res.threshold_ok = p > res.threshold;
  if (N >= 2 && !res.threshold_ok) {
    throw StageError("threshold", fmt::format("p = {} does not exceed {:.6f}", p, res.threshold));
  }

  res.eig = stage("eigen", [&] {
    return eig_in ? *eig_in : eigen_solve(p, mesh, cfg.minmax, cfg.eig_tol);
  });
  const double l1 = res.eig.lambda1;

  NonlinearitySpec spec = spec_in;
  stage("hypotheses", [&] {
    const HypothesisReport rep = check_hypotheses(spec, cfg.hypothesis_budget, cfg.seed);
    for (const char* name : {"f2", "f3", "f4", "f5"}) {
      if (rep.get(name).status == HypothesisStatus::Violated) {
        throw StageError("hypotheses", std::string(name) + " violated: " + rep.get(name).note);
      }
    }
    return 0;
  });

  res.ladder = stage("ladder", [&] { return ladder_params(spec, res.eig); });
  if (!(res.ladder.lambda > res.eig.lambda2)) {
    throw StageError("ladder", fmt::format("lambda = {:.6g} does not exceed lambda2 = {:.6g}",
                                           res.ladder.lambda, res.eig.lambda2));
  }
  res.mu = (spec.mu > 0.0 && spec.mu < l1) ? spec.mu : 0.5 * l1;
  res.ladder.mu = res.mu;

  stage("alpha1_beta2", [&] {
    const FeFunction gm = forcing_bound(spec, mesh, res.mu, -1);
    const FeFunction gp = forcing_bound(spec, mesh, res.mu, +1);
    res.cones.alpha1 = build_alpha1(spec, gm, l1, res.mu, res.ladder.t_bar, cfg.newton);
    res.cones.beta2 = build_beta2(spec, gp, l1, res.mu, res.ladder.t_bar, cfg.newton);
    // K must be order preserving on the whole range spanned by the cones.
    const double range = std::max(res.cones.alpha1.vertex.sup_norm(),
                                  res.cones.beta2.vertex.sup_norm());
    spec = spec.with_M(std::max(spec.M, estimate_M(spec, range)));
    return 0;
  });

  stage("ladder", [&] {
    const double l = cfg.l_fraction * res.ladder.l_bar;
    res.ladder.l = l;
    auto [a2, b1] = build_ladder(spec, res.eig, l, res.ladder);
    res.cones.alpha2 = std::move(a2);
    res.cones.beta1 = std::move(b1);
    return 0;
  });

  stage("certificates", [&] {
    const std::array<const ConeSpec*, 4> list{&res.cones.alpha1, &res.cones.beta1,
                                              &res.cones.alpha2, &res.cones.beta2};
    for (std::size_t k = 0; k < list.size(); ++k) {
      for (Branch b : candidate_branches(p)) {
        InvarianceCertificate cert;
        try {
          cert = check_invariance_certificate(*list[k], spec, b);
        } catch (const ParameterError&) {
          continue;  // branch does not apply to (p, N, q)
        }
        res.certificates.push_back({list[k]->label, cert});
        if (cert.status == CertificateStatus::Satisfied && res.certified_branch[k].empty()) {
          res.certified_branch[k] = to_string(b);
        }
      }
      if (res.certified_branch[k].empty() && require_certificates) {
        throw StageError("certificates", "no invariance certificate holds for " + list[k]->label);
      }
    }
    return 0;
  });

  res.eps_bar = stage("cones_disjoint", [&] {
    const double e = cfg.eps_fraction * estimate_eps_bar(res.cones.alpha2, res.cones.beta1);
    if (!cones_disjoint(res.cones.alpha2, res.cones.beta1, e)) {
      throw StageError("cones_disjoint", "ladder cones overlap");
    }
    return e;
  });
  for (ConeSpec* c : {&res.cones.alpha1, &res.cones.beta1, &res.cones.alpha2, &res.cones.beta2}) {
    c->eps = res.eps_bar;
  }
  res.spec = spec;
  return res;
}

FourSolutionsResult four_solutions(const NonlinearitySpec& spec_in, const MeshPtr& mesh,
                                   const FourSolutionsConfig& cfg, const EigenResult* eig_in) {
  FourSolutionsResult out;
  out.setup = setup_cones(spec_in, mesh, cfg, eig_in, true);
  ConeSetup& res = out.setup;
  const NonlinearitySpec& spec = res.spec;

  const auto polish = [&](const FeFunction& u, const ConeSpec& lo, const ConeSpec& hi) {
    const double r = residual(u, spec).dual_norm;
    if (r <= cfg.residual_target) {
      return u;
    }
    const auto inside = [&](const FeFunction& v) {
      return cone_distance(v, lo) == 0.0 && cone_distance(v, hi) == 0.0;
    };
    const NewtonResult nr = newton_solve(u, spec, cfg.newton, cfg.residual_target, 50, inside);
    return nr.converged ? nr.u : u;
  };
  FeFunction u1 = stage("monotone_u1", [&] {
    const MonotoneResult mr = monotone_iterate(res.cones.alpha1.vertex, true, spec, cfg.monotone);
    out.steps_u1 = mr.steps;
    return polish(mr.u, res.cones.alpha1, res.cones.beta1);
  });
  FeFunction u2 = stage("monotone_u2", [&] {
    const MonotoneResult mr = monotone_iterate(res.cones.beta2.vertex, false, spec, cfg.monotone);
    out.steps_u2 = mr.steps;
    return polish(mr.u, res.cones.alpha2, res.cones.beta2);
  });

  out.mp = stage("mountain_pass", [&] {
    MountainPassInput in;
    in.cones = res.cones;
    in.u1 = u1;
    in.u2 = u2;
    // Symmetry breaking: a multiple of the lambda2 max node, a sign-changing profile.
    if (!res.eig.lambda2_path.empty() && cfg.bump_scale > 0.0) {
      const FeFunction& psi = res.eig.lambda2_path[res.eig.max_node];
      const double scale =
          cfg.bump_scale * std::max(u1.sup_norm(), u2.sup_norm()) / psi.sup_norm();
      in.bump = psi * scale;
      in.bump.clear_boundary();
    }
    MinmaxConfig mc = cfg.minmax;
    mc.eps_bar = res.eps_bar;
    return mountain_pass(in, spec, mc, cfg.newton, cfg.on_outer);
  });
  if (out.mp.status != MountainPassStatus::Found) {
    throw StageError("mountain_pass", to_string(out.mp.status) + ": " + out.mp.message);
  }

  const auto report = [&](const std::string& name, const FeFunction& u) {
    SolutionReport s;
    s.name = name;
    s.u = u;
    s.residual = residual(u, spec).dual_norm;
    s.energy = energy(u, spec);
    s.sign = sign_class(u);
    return s;
  };
  out.solutions.push_back(report("trivial", FeFunction(mesh)));
  out.solutions.push_back(report("positive", u2));
  out.solutions.push_back(report("negative", u1));
  out.solutions.push_back(report("sign_changing", out.mp.u3));
  out.min_pairwise_l2 = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < out.solutions.size(); ++a) {
    for (std::size_t b = a + 1; b < out.solutions.size(); ++b) {
      out.min_pairwise_l2 =
          std::min(out.min_pairwise_l2, ls_norm(out.solutions[a].u - out.solutions[b].u, 2.0));
    }
  }
  return out;
}

}  // namespace conewalk
