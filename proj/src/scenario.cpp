#include "conewalk/scenario.hpp"

#include "conewalk/inequalities.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace conewalk {

namespace fs = std::filesystem;

void Summary::add(const std::string& key, double value) {
  entries_.emplace_back(key, fmt::format("{:.12e}", value));
}
void Summary::add(const std::string& key, int value) {
  entries_.emplace_back(key, std::to_string(value));
}
void Summary::add(const std::string& key, long value) {
  entries_.emplace_back(key, std::to_string(value));
}
void Summary::add(const std::string& key, std::uint64_t value) {
  entries_.emplace_back(key, std::to_string(value));
}
void Summary::add(const std::string& key, bool value) {
  entries_.emplace_back(key, value ? "true" : "false");
}
void Summary::add(const std::string& key, const std::string& value) {
  std::string v = value;
  for (char& c : v) {
    if (c == '\n' || c == '\r') {
      c = ' ';
    }
  }
  entries_.emplace_back(key, v);
}

std::string Summary::str() const {
  std::string s;
  for (const auto& [k, v] : entries_) {
    s += k + " = " + v + "\n";
  }
  return s;
}

std::map<std::string, std::string> parse_summary(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) {
      out[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  return out;
}

NonlinearitySpec make_spec(const RunConfig& cfg, const EigenResult* eig) {
  const CatalogConfig& c = cfg.catalog;
  double lambda = c.lambda;
  if (!c.lambda_ref.empty()) {
    if (eig == nullptr) {
      throw ParameterError("relative lambda needs the eigenvalues");
    }
    lambda = c.lambda_factor * (c.lambda_ref == "lambda1" ? eig->lambda1 : eig->lambda2);
  }
  const DomainSpec dom = cfg.domain_spec();
  NonlinearitySpec spec;
  if (c.name == "saturating") {
    spec = NonlinearitySpec::saturating(cfg.p, lambda, c.delta, dom);
  } else if (c.name == "linear") {
    spec = NonlinearitySpec::linear(cfg.p, lambda, dom);
  } else {
    const double g = c.g;
    spec = NonlinearitySpec::affine_forcing(cfg.p, lambda, [g](Point) { return g; },
                                            std::abs(g), dom);
  }
  if (std::isfinite(c.mu)) {
    spec = spec.with_mu(c.mu);
  }
  return spec;
}

namespace {

std::string branch_tag(const std::string& branch) {
  std::string t;
  for (char ch : branch) {
    if (ch != '.' && ch != '(' && ch != ')') {
      t += ch;
    }
  }
  return t;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  os << text;
}

void write_certificate(const fs::path& dir, const std::string& cone,
                       const InvarianceCertificate& c) {
  std::string s;
  s += "cone = " + cone + "\n";
  s += "branch = " + to_string(c.branch) + "\n";
  s += "status = " + to_string(c.status) + "\n";
  s += std::string("norm = ") + (c.sup_norm ? "sup" : "integral") + "\n";
  s += fmt::format("exponent = {:.12e}\n", c.exponent);
  s += fmt::format("dist_exponent = {:.12e}\n", c.dist_exponent);
  for (std::size_t k = 0; k < std::min(c.levels.size(), c.values.size()); ++k) {
    s += fmt::format("level_{} = {} {:.12e}\n", k, c.levels[k], c.values[k]);
  }
  s += fmt::format("growth_ratio = {:.12e}\n", c.growth_ratio);
  s += "note = " + c.note + "\n";
  write_text(dir / ("certificate_" + cone + "_" + branch_tag(to_string(c.branch)) + ".txt"), s);
}

void write_path_csv(const fs::path& path, const PathState& st) {
  std::ofstream os(path);
  const Mesh& mesh = st.nodes.front().mesh();
  const auto pts = mesh.nodes();
  os << (mesh.dimension() == 1 ? "x" : "x,y");
  for (std::size_t j = 0; j < st.nodes.size(); ++j) {
    os << ",node_" << j;
  }
  os << '\n';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << fmt::format("{:.15e}", pts[i].x);
    if (mesh.dimension() == 2) {
      os << fmt::format(",{:.15e}", pts[i].y);
    }
    for (const auto& u : st.nodes) {
      os << fmt::format(",{:.15e}", u[i]);
    }
    os << '\n';
  }
}

void add_problem(Summary& s, const RunConfig& cfg, const NonlinearitySpec& spec) {
  s.add("catalog", cfg.catalog.name);
  s.add("lambda", spec.param_lambda);
  s.add("delta", spec.param_delta);
}

void add_eigen(Summary& s, const EigenResult& eig) {
  s.add("lambda1", eig.lambda1);
  s.add("lambda2", eig.lambda2);
  s.add("hopf_margin", eig.hopf_margin);
  s.add("lambda1_iterations", eig.iterations1);
  s.add("lambda2_iterations", eig.iterations2);
}

EigenResult run_eigen(const RunConfig& cfg, const MeshPtr& mesh) {
  try {
    return eigen_solve(cfg.p, mesh, cfg.solver.minmax, cfg.solver.eig_tol);
  } catch (const std::exception& e) {
    throw StageError("eigen", e.what());
  }
}

bool needs_eigen(const RunConfig& cfg) { return !cfg.catalog.lambda_ref.empty(); }

void cmd_eigen(const RunConfig& cfg, const MeshPtr& mesh, Summary& s, const fs::path& out,
               std::ostream& log) {
  const EigenResult eig = run_eigen(cfg, mesh);
  log << fmt::format("lambda1 = {:.10g}, lambda2 = {:.10g}\n", eig.lambda1, eig.lambda2);
  add_eigen(s, eig);
  write_csv((out / "solution_phi1.csv").string(), eig.phi1);
  if (!eig.lambda2_path.empty()) {
    write_csv((out / "solution_psi2.csv").string(), eig.lambda2_path[eig.max_node]);
  }
  if (cfg.trace) {
    PathState st;
    st.nodes = eig.lambda2_path;
    if (!st.nodes.empty()) {
      write_path_csv(out / "trace_lambda2_path.csv", st);
    }
  }
}

FeFunction make_vertex(const VertexConfig& v, bool sub, const RunConfig& cfg,
                       const NonlinearitySpec& spec, const MeshPtr& mesh,
                       const EigenResult* eig) {
  if (v.kind == "zero") {
    return FeFunction(mesh);
  }
  if (v.kind == "parabola") {
    const double a = cfg.x0;
    const double b = cfg.x1;
    const bool square = mesh->dimension() == 2;
    return interpolate(
        [&](Point x) {
          return square ? v.scale * x.x * (1.0 - x.x) * x.y * (1.0 - x.y)
                        : v.scale * (x.x - a) * (b - x.x);
        },
        mesh);
  }
  const double mu = (spec.mu > 0.0 && spec.mu < eig->lambda1) ? spec.mu : 0.5 * eig->lambda1;
  const FeFunction g = forcing_bound(spec, mesh, mu, sub ? -1 : +1);
  const ConeSpec c = sub ? build_alpha1(spec, g, eig->lambda1, mu, 0.0, cfg.solver.newton)
                         : build_beta2(spec, g, eig->lambda1, mu, 0.0, cfg.solver.newton);
  return c.vertex;
}

void cmd_solve_min(const RunConfig& cfg, const MeshPtr& mesh, Summary& s, const fs::path& out,
                   std::ostream& log) {
  const bool outer = cfg.alpha.kind == "outer" || cfg.beta.kind == "outer";
  EigenResult eig;
  if (needs_eigen(cfg) || outer) {
    eig = run_eigen(cfg, mesh);
    add_eigen(s, eig);
  }
  NonlinearitySpec spec = make_spec(cfg, &eig);
  add_problem(s, cfg, spec);
  FeFunction alpha;
  FeFunction beta;
  try {
    alpha = make_vertex(cfg.alpha, true, cfg, spec, mesh, &eig);
    beta = make_vertex(cfg.beta, false, cfg, spec, mesh, &eig);
  } catch (const std::exception& e) {
    throw StageError("cones", e.what());
  }
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > beta[i]) {
      throw StageError("cones", "alpha <= beta fails at node " + std::to_string(i));
    }
  }
  const double range = std::max(alpha.sup_norm(), beta.sup_norm());
  spec = spec.with_M(std::max(spec.M, estimate_M(spec, range)));
  s.add("M", spec.M);
  MonotoneResult mr;
  try {
    mr = monotone_iterate(alpha, true, spec, cfg.solver.monotone);
  } catch (const std::exception& e) {
    throw StageError("monotone", e.what());
  }
  double above = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    above = std::max(above, mr.u[i] - beta[i]);
  }
  log << fmt::format("monotone iteration: {} steps, residual {:.3e}\n", mr.steps, mr.residual);
  s.add("steps", mr.steps);
  s.add("residual", mr.residual);
  s.add("max_violation", mr.max_violation);
  s.add("max_above_beta", above);
  s.add("below_beta", above <= 1e-10 * (1.0 + beta.sup_norm()));
  s.add("solution_min", mr.u.min());
  s.add("solution_max", mr.u.max());
  s.add("energy", energy(mr.u, spec));
  write_csv((out / "solution_minimal.csv").string(), mr.u);
  if (cfg.trace) {
    std::ofstream os(out / "trace_monotone.csv");
    os << "step,step_norm\n";
    for (std::size_t k = 0; k < mr.step_norms.size(); ++k) {
      os << fmt::format("{},{:.15e}\n", k + 1, mr.step_norms[k]);
    }
  }
}

const std::array<const char*, 4> kConeNames{"alpha1", "beta1", "alpha2", "beta2"};

void add_setup(Summary& s, const ConeSetup& st, const fs::path& out) {
  s.add("mu", st.mu);
  s.add("M", st.spec.M);
  s.add("t_bar", st.ladder.t_bar);
  s.add("l_bar", st.ladder.l_bar);
  s.add("l", st.ladder.l);
  s.add("threshold", st.threshold);
  s.add("threshold_ok", st.threshold_ok);
  const std::array<const ConeSpec*, 4> cones{&st.cones.alpha1, &st.cones.beta1,
                                             &st.cones.alpha2, &st.cones.beta2};
  for (std::size_t k = 0; k < 4; ++k) {
    const std::string pre = std::string("cone.") + kConeNames[k];
    s.add(pre + ".strict", cones[k]->strict);
    s.add(pre + ".sup_norm", cones[k]->vertex.sup_norm());
    s.add(pre + ".branch", st.certified_branch[k].empty() ? "none" : st.certified_branch[k]);
  }
  for (const auto& rec : st.certificates) {
    const auto& c = rec.certificate;
    const std::string pre = "certificate." + rec.cone + "." + branch_tag(to_string(c.branch));
    s.add(pre + ".status", to_string(c.status));
    s.add(pre + ".value", c.values.empty() ? 0.0 : c.values.back());
    s.add(pre + ".growth_ratio", c.growth_ratio);
    write_certificate(out, rec.cone, c);
  }
  s.add("eps_bar", st.eps_bar);
}

void cmd_four_solutions(const RunConfig& cfg, const MeshPtr& mesh, Summary& s,
                        const fs::path& out, std::ostream& log) {
  const EigenResult eig = run_eigen(cfg, mesh);
  add_eigen(s, eig);
  const NonlinearitySpec spec = make_spec(cfg, &eig);
  add_problem(s, cfg, spec);
  FourSolutionsConfig fc = cfg.solver;
  fc.seed = cfg.seed;
  if (cfg.trace) {
    fc.on_outer = [&](int it, const PathState& st) {
      write_path_csv(out / fmt::format("trace_path_{:04d}.csv", it), st);
    };
  }
  const FourSolutionsResult r = four_solutions(spec, mesh, fc, &eig);
  add_setup(s, r.setup, out);
  s.add("steps_u1", r.steps_u1);
  s.add("steps_u2", r.steps_u2);
  const MountainPassResult& mp = r.mp;
  s.add("mp.status", to_string(mp.status));
  s.add("mp.level", mp.level);
  s.add("mp.outer_iterations", mp.outer_iterations);
  s.add("mp.newton_iterations", mp.newton_iterations);
  s.add("mp.level_monotone", mp.level_monotone);
  s.add("mp.max_level_increase", mp.max_level_increase);
  s.add("mp.pg_at_switch", mp.pg_at_switch);
  s.add("mp.lower_bound", mp.lower_bound);
  s.add("mp.lower_bound_ok", mp.lower_bound_ok);
  s.add("mp.localization_ok", mp.location.ok);
  s.add("mp.dist_alpha1", mp.location.dist_alpha1);
  s.add("mp.dist_beta2", mp.location.dist_beta2);
  s.add("mp.dist_alpha2", mp.location.dist_alpha2);
  s.add("mp.dist_beta1", mp.location.dist_beta1);
  s.add("solution_count", static_cast<int>(r.solutions.size()));
  for (std::size_t k = 0; k < r.solutions.size(); ++k) {
    const SolutionReport& sol = r.solutions[k];
    const std::string pre = "solution." + std::to_string(k);
    s.add(pre + ".name", sol.name);
    s.add(pre + ".sign", sol.sign);
    s.add(pre + ".residual", sol.residual);
    s.add(pre + ".energy", sol.energy);
    s.add(pre + ".min", sol.u.min());
    s.add(pre + ".max", sol.u.max());
    write_csv((out / ("solution_" + sol.name + ".csv")).string(), sol.u);
  }
  s.add("min_pairwise_l2", r.min_pairwise_l2);
  if (cfg.trace) {
    std::ofstream os(out / "trace_levels.csv");
    os << "iteration,level\n";
    for (std::size_t k = 0; k < mp.levels.size(); ++k) {
      os << fmt::format("{},{:.15e}\n", k, mp.levels[k]);
    }
  }
  log << fmt::format("four solutions: mountain pass level {:.6g}, J(u3) = {:.6g}\n", mp.level,
                     mp.energy_u3);
}

void cmd_check_cones(const RunConfig& cfg, const MeshPtr& mesh, Summary& s, const fs::path& out,
                     std::ostream& log) {
  const EigenResult eig = run_eigen(cfg, mesh);
  add_eigen(s, eig);
  const NonlinearitySpec spec = make_spec(cfg, &eig);
  add_problem(s, cfg, spec);
  FourSolutionsConfig fc = cfg.solver;
  fc.seed = cfg.seed;
  const ConeSetup st = setup_cones(spec, mesh, fc, &eig, false);
  add_setup(s, st, out);
  const DisjointReport dr = cones_disjoint_report(st.cones.alpha2, st.cones.beta1, st.eps_bar);
  s.add("disjoint", dr.disjoint);
  s.add("disjoint_measure_fraction", dr.measure_fraction);
  const std::array<const ConeSpec*, 4> cones{&st.cones.alpha1, &st.cones.beta1,
                                             &st.cones.alpha2, &st.cones.beta2};
  bool all = true;
  for (std::size_t k = 0; k < 4; ++k) {
    write_csv((out / (std::string("solution_") + kConeNames[k] + ".csv")).string(),
              cones[k]->vertex);
    all = all && !st.certified_branch[k].empty();
  }
  s.add("all_certified", all);
  log << (all ? "all cones certified\n" : "some cones have no satisfied certificate\n");
}

void cmd_verify_inequalities(const RunConfig& cfg, const MeshPtr& mesh, Summary& s,
                             std::ostream& log) {
  const MeshPtr small = Mesh::create(mesh->domain(), cfg.integral_n);
  const InequalitySweep sw = verify_inequalities(cfg.inequality_ps, cfg.vector_samples,
                                                 cfg.integral_samples, small, cfg.seed);
  s.add("vector_samples", cfg.vector_samples);
  s.add("integral_samples", cfg.integral_samples);
  for (const auto& c : sw.checks) {
    const std::string pre = fmt::format("ineq.{}.p{:g}", c.name, c.p);
    s.add(pre + ".samples", c.samples);
    s.add(pre + ".failures", c.failures);
    s.add(pre + ".extreme", c.extreme);
    s.add(pre + ".bound", c.bound);
  }
  s.add("total_failures", sw.total_failures);
  s.add("pass", sw.total_failures == 0);
  log << fmt::format("{} checks, {} failures\n", sw.checks.size(), sw.total_failures);
}

}  // namespace

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  RunOutcome res;
  Summary& s = res.summary;
  const fs::path out(cfg.out);
  fs::create_directories(out);
  s.add("command", cfg.command);
  s.add("seed", cfg.seed);
  s.add("domain", cfg.domain);
  s.add("n", cfg.n);
  s.add("p", cfg.p);
  try {
    const MeshPtr mesh = Mesh::create(cfg.domain_spec(), cfg.n);
    if (cfg.command == "eigen") {
      cmd_eigen(cfg, mesh, s, out, log);
    } else if (cfg.command == "solve-min") {
      cmd_solve_min(cfg, mesh, s, out, log);
    } else if (cfg.command == "four-solutions") {
      cmd_four_solutions(cfg, mesh, s, out, log);
    } else if (cfg.command == "check-cones") {
      cmd_check_cones(cfg, mesh, s, out, log);
    } else if (cfg.command == "verify-inequalities") {
      cmd_verify_inequalities(cfg, mesh, s, log);
    } else {
      throw ConfigError("command", "unknown subcommand '" + cfg.command + "'");
    }
    s.add("status", "ok");
  } catch (const StageError& e) {
    s.add("status", "failed");
    s.add("failed_stage", e.stage());
    s.add("message", e.what());
    log << "stage failure: " << e.what() << '\n';
    res.exit_code = 2;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    s.add("status", "failed");
    s.add("failed_stage", cfg.command);
    s.add("message", e.what());
    log << "failure: " << e.what() << '\n';
    res.exit_code = 2;
  }
  write_text(out / "summary.txt", s.str());
  return res;
}

}  // namespace conewalk
