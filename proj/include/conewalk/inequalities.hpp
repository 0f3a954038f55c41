#pragma once

#include "conewalk/functional.hpp"
#include "conewalk/koperator.hpp"

#include <random>
#include <string>
#include <vector>

namespace conewalk {

/// Outcome of one sampled inequality. `extreme` is the worst observed
/// lhs/rhs ratio: the minimum for lower bounds, the maximum for upper bounds.
struct InequalityCheck {
  std::string name;
  double p = 0.0;
  long samples = 0;
  long failures = 0;
  double extreme = 0.0;
  double bound = 0.0;  // the constant the ratio is compared with
};

/// Simon-type vector inequalities for phi(xi) = |xi|^(p-2) xi in R^N.
std::vector<InequalityCheck> check_vector_inequalities(double p, int N, long samples,
                                                       std::mt19937_64& rng,
                                                       double slack = 1e-12);

/// Integral forms on pairs of random functions, integrated with the element
/// quadrature rule: the monotonicity lower bound for 1 < p <= 2 and the
/// L^{p'} Lipschitz bound for p >= 2.
std::vector<InequalityCheck> check_integral_inequalities(double p, const MeshPtr& mesh,
                                                         int samples, std::mt19937_64& rng,
                                                         double slack = 1e-10);

struct InequalitySweep {
  std::vector<InequalityCheck> checks;
  long total_failures = 0;
};

InequalitySweep verify_inequalities(const std::vector<double>& ps, long vector_samples,
                                    int integral_samples, const MeshPtr& mesh,
                                    std::uint64_t seed);

/// Empirical constants of the pseudogradient estimates over random u.
struct PseudogradientStats {
  int samples = 0;
  double descent_min = 0.0;   // min of J'(u)[u-K(u)] / lower-bound form
  double descent_max = 0.0;
  double residual_max = 0.0;  // max of dual-norm surrogate / upper-bound form
  double max_norm_u = 0.0;
  double max_norm_K = 0.0;    // bounded image of a bounded ball
};

PseudogradientStats pseudogradient_constants(const NonlinearitySpec& spec, const MeshPtr& mesh,
                                             int samples, double radius,
                                             const NewtonConfig& cfg, std::mt19937_64& rng);

}  // namespace conewalk
