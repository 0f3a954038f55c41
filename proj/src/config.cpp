#include "conewalk/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace conewalk {

namespace pt = boost::property_tree;

DomainSpec RunConfig::domain_spec() const {
  return domain == "square" ? DomainSpec::unit_square() : DomainSpec::interval(x0, x1);
}

namespace {

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError(section, "keys must live inside a section");
      }
      for (const auto& kv : body) {
        seen_.insert(section + "." + kv.first);
      }
    }
  }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    const auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    return v ? std::optional<std::string>(*v) : std::nullopt;
  }

  void get(const std::string& key, std::string& out) {
    if (auto v = raw(key)) {
      out = *v;
    }
  }

  void get(const std::string& key, double& out) {
    if (auto v = raw(key)) {
      out = parse_double(key, *v);
    }
  }

  template <class I>
    requires std::is_integral_v<I>
  void get(const std::string& key, I& out) {
    if (auto v = raw(key)) {
      I value{};
      const auto* end = v->data() + v->size();
      const auto [ptr, ec] = std::from_chars(v->data(), end, value);
      if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, "expected an integer, got '" + *v + "'");
      }
      out = value;
    }
  }

  void get(const std::string& key, bool& out) {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        out = false;
      } else {
        throw ConfigError(key, "expected true or false, got '" + *v + "'");
      }
    }
  }

  void get(const std::string& key, std::vector<double>& out) {
    if (auto v = raw(key)) {
      out.clear();
      std::stringstream ss(*v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, trim(item)));
      }
      if (out.empty()) {
        throw ConfigError(key, "expected a comma separated list");
      }
    }
  }

  void reject_unknown() const {
    for (const auto& k : seen_) {
      if (!used_.count(k)) {
        throw ConfigError(k, "unknown key");
      }
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  }

  static double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    return value;
  }

  const pt::ptree& tree_;
  std::set<std::string> seen_;
  std::set<std::string> used_;
};

void check_one_of(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) {
      return;
    }
  }
  std::string list;
  for (const char* a : allowed) {
    list += list.empty() ? a : std::string(", ") + a;
  }
  throw ConfigError(key, "'" + value + "' is not one of " + list);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  Reader r(tree);
  RunConfig c;

  r.get("run.command", c.command);
  r.get("run.seed", c.seed);
  r.get("run.out", c.out);
  r.get("run.trace", c.trace);

  r.get("domain.kind", c.domain);
  r.get("domain.x0", c.x0);
  r.get("domain.x1", c.x1);
  r.get("domain.n", c.n);

  r.get("problem.p", c.p);
  r.get("problem.catalog", c.catalog.name);
  r.get("problem.lambda", c.catalog.lambda);
  r.get("problem.lambda_factor", c.catalog.lambda_factor);
  r.get("problem.lambda_ref", c.catalog.lambda_ref);
  r.get("problem.delta", c.catalog.delta);
  r.get("problem.g", c.catalog.g);
  r.get("problem.mu", c.catalog.mu);

  auto& s = c.solver;
  r.get("solver.tolerance", s.newton.tolerance);
  r.get("solver.eig_tol", s.eig_tol);
  r.get("solver.residual_target", s.residual_target);
  r.get("solver.monotone_step_tol", s.monotone.step_tol);
  r.get("solver.monotone_max_steps", s.monotone.max_steps);
  r.get("solver.path_nodes", s.minmax.m);
  r.get("solver.max_outer", s.minmax.max_outer);
  r.get("solver.inner_flow_steps", s.minmax.inner_flow_steps);
  r.get("solver.newton_every", s.minmax.newton_every);
  r.get("solver.pg_switch", s.minmax.pg_switch);
  r.get("solver.level_tol", s.minmax.level_tol);
  r.get("solver.l_fraction", s.l_fraction);
  r.get("solver.eps_fraction", s.eps_fraction);
  r.get("solver.bump_scale", s.bump_scale);
  r.get("solver.hypothesis_budget", s.hypothesis_budget);

  r.get("solve_min.alpha", c.alpha.kind);
  r.get("solve_min.alpha_scale", c.alpha.scale);
  r.get("solve_min.beta", c.beta.kind);
  r.get("solve_min.beta_scale", c.beta.scale);

  r.get("inequalities.ps", c.inequality_ps);
  r.get("inequalities.vector_samples", c.vector_samples);
  r.get("inequalities.integral_samples", c.integral_samples);
  r.get("inequalities.integral_n", c.integral_n);
  r.reject_unknown();

  if (!c.command.empty()) {
    check_one_of("run.command", c.command,
                 {"eigen", "solve-min", "four-solutions", "check-cones", "verify-inequalities"});
  }
  check_one_of("domain.kind", c.domain, {"interval", "square"});
  check_one_of("problem.catalog", c.catalog.name, {"saturating", "linear", "affine_forcing"});
  check_one_of("solve_min.alpha", c.alpha.kind, {"zero", "parabola", "outer"});
  check_one_of("solve_min.beta", c.beta.kind, {"zero", "parabola", "outer"});
  if (!c.catalog.lambda_ref.empty()) {
    check_one_of("problem.lambda_ref", c.catalog.lambda_ref, {"lambda1", "lambda2"});
    if (!(c.catalog.lambda_factor > 0.0)) {
      throw ConfigError("problem.lambda_factor", "must be positive when lambda_ref is set");
    }
  }
  if (!(c.x1 > c.x0)) {
    throw ConfigError("domain.x1", "must exceed domain.x0");
  }
  if (c.n < 4) {
    throw ConfigError("domain.n", "need at least 4 cells");
  }
  if (!(c.p > 1.0)) {
    throw ConfigError("problem.p", "must exceed 1");
  }
  if (!(c.catalog.delta > 0.0)) {
    throw ConfigError("problem.delta", "must be positive");
  }
  try {
    s.minmax.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("solver", e.what());
  }
  if (c.out.empty()) {
    throw ConfigError("run.out", "must not be empty");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("--config", "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace conewalk
