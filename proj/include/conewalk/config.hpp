#pragma once

#include "conewalk/minmax.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

/// Config parse or validation failure; `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Catalog entry plus parameters. lambda is either given directly or as
/// lambda_factor times lambda1 / lambda2 (lambda_ref) of the run's mesh.
struct CatalogConfig {
  std::string name = "saturating";  // saturating | linear | affine_forcing
  double lambda = 0.0;
  double lambda_factor = 0.0;
  std::string lambda_ref;           // "", "lambda1" or "lambda2"
  double delta = 1.0;
  double g = 0.0;                   // constant forcing for affine_forcing
  double mu = std::numeric_limits<double>::quiet_NaN();
};

/// Vertex choice for solve-min: zero, parabola (scale * x(1-x), or the tensor
/// product on the square) or outer (the built alpha1 / beta2).
struct VertexConfig {
  std::string kind = "zero";
  double scale = 1.0;
};

struct RunConfig {
  std::string command;
  std::string domain = "interval";  // interval | square
  double x0 = 0.0;
  double x1 = 1.0;
  int n = 512;
  double p = 2.0;
  CatalogConfig catalog;
  FourSolutionsConfig solver;
  VertexConfig alpha;
  VertexConfig beta{"parabola", 1.0};
  std::vector<double> inequality_ps{1.2, 1.5, 2.0, 3.0, 4.0};
  long vector_samples = 100000;
  int integral_samples = 1000;
  int integral_n = 64;
  bool trace = false;
  std::string out = "out";
  std::uint64_t seed = 1;

  DomainSpec domain_spec() const;
};

/// Sections [run], [domain], [problem], [solver], [solve_min], [inequalities].
/// Unknown sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace conewalk
