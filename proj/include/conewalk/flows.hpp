#pragma once

#include "conewalk/cones.hpp"
#include "conewalk/koperator.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

class FlowError : public std::runtime_error {
 public:
  enum class Kind { NonMonotone, MaxSteps, Solver };
  FlowError(Kind kind, const std::string& what, FeFunction last)
      : std::runtime_error(what), kind_(kind), last_(std::move(last)) {}
  Kind kind() const { return kind_; }
  const FeFunction& last_iterate() const { return last_; }

 private:
  Kind kind_;
  FeFunction last_;
};

// ---------------------------------------------------------------- monotone iteration

struct MonotoneConfig {
  int max_steps = 5000;
  double step_tol = 1e-12;        // stop when ||u_{k+1} - u_k|| <= step_tol (1 + ||u_k||)
  double monotone_tol = 1e-10;    // allowed nodal violation, times (1 + ||u_k||_inf)
  NewtonConfig newton;
};

struct MonotoneResult {
  FeFunction u;
  int steps = 0;
  std::vector<double> step_norms;
  double max_violation = 0.0;  // largest nodal move against the run direction
  double residual = 0.0;       // dual-norm surrogate of the limit
};

/// u_{k+1} = K(u_k) from a sub- (ascending) or supersolution vertex (descending).
/// Throws FlowError on a monotonicity violation or when the budget runs out.
MonotoneResult monotone_iterate(const FeFunction& start, bool ascending,
                                const NonlinearitySpec& spec, const MonotoneConfig& cfg);

// ---------------------------------------------------------------- descent flow

/// Cone region used by the cutoff: the ramp is 1 when the cone distance is
/// below radius - smoothing (inside = true) and 0 above radius; mirrored for
/// inside = false.
struct FlowConstraint {
  int cone = 0;
  double radius = 0.0;
  bool inside = true;
};

struct FlowRow {
  double t = 0.0;
  double J = 0.0;
  double pg_norm = 0.0;
  std::vector<double> dist;
  double chi = 0.0;
};

struct FlowConfig {
  double dt = 0.0;       // initial step; 0 selects 0.1 * the first constraint radius (or 0.1)
  double dt_max = 1.0;
  double dt_min = 1e-14;
  int max_steps = 1000;
  int grow_after = 5;    // accepted steps before the step doubles
  // Energy band of the set A: |J - level| < band. NaN level disables the band.
  double level = std::numeric_limits<double>::quiet_NaN();
  double band = std::numeric_limits<double>::infinity();
  double smoothing = 1e-3;
  std::vector<FlowConstraint> constraints;
  /// Cones whose distance an accepted step may not push beyond the given radius.
  std::vector<FlowConstraint> guards;
  double pg_tol = 1e-8;  // terminal pg_norm
  NewtonConfig newton;
  /// Optional observer of the initial state and every accepted step.
  std::function<void(const FeFunction&, const FlowRow&)> on_step;

  void validate() const;
};

enum class FlowStop { Critical, LeftRegion, MaxSteps, Stalled };
std::string to_string(FlowStop s);

struct FlowResult {
  FeFunction u;
  std::vector<FlowRow> trace;
  FlowStop stop = FlowStop::MaxSteps;
  int accepted = 0;
  int rejected = 0;
  double dt = 0.0;            // step size at exit
  double rho_empirical = 0.0; // min energy drop per unit time over steps with chi = 1
  FeFunction k_value;         // K(u) at exit
};

/// Cutoff chi(u) for a given energy and cone distances.
double flow_cutoff(const FlowConfig& cfg, double J, const std::vector<double>& dist);

/// Explicit Euler on -chi (u - K u) / ||u - K u|| with step halving on energy
/// increase. `warm` (may be empty) seeds the first K solve.
FlowResult descent_flow(const FeFunction& u0, const std::vector<ConeSpec>& cones,
                        const FlowConfig& cfg, const NonlinearitySpec& spec,
                        const FeFunction& warm = {});

void write_trace_csv(std::ostream& os, const std::vector<FlowRow>& trace);
void write_trace_csv(const std::string& path, const std::vector<FlowRow>& trace);

}  // namespace conewalk
