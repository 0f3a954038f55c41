#include "conewalk/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

int main(int argc, char** argv) {
  CLI::App app{"conewalk: p-Laplacian cone and mountain-pass solver"};
  app.require_subcommand(1);

  std::string config_path;
  bool trace = false;
  std::string out_dir;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"eigen", "first and second Dirichlet eigenpairs of the p-Laplacian"},
      {"solve-min", "minimal solution between a sub- and a supersolution"},
      {"four-solutions", "trivial, positive, negative and sign-changing solutions"},
      {"check-cones", "build the four cones, certificates and separation radius"},
      {"verify-inequalities", "sample the vector and integral inequalities"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI run configuration")->required();
    sub->add_flag("--trace", trace, "write per-iteration trace CSVs");
    sub->add_option("--out", out_dir, "output directory (overrides run.out)");
    sub->add_option("--seed", seed, "random seed (overrides run.seed)");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    conewalk::RunConfig cfg = conewalk::load_config(config_path);
    const CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    cfg.trace = cfg.trace || trace;
    if (!out_dir.empty()) {
      cfg.out = out_dir;
    }
    if (sub->count("--seed") > 0) {
      cfg.seed = seed;
    }
    const conewalk::RunOutcome r = conewalk::run(cfg, std::cerr);
    std::cout << r.summary.str();
    return r.exit_code;
  } catch (const conewalk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
}
