#pragma once

#include "conewalk/cones.hpp"
#include "conewalk/eigen.hpp"
#include "conewalk/flows.hpp"
#include "conewalk/path.hpp"

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewalk {

/// The four cones of the mountain-pass geometry.
struct ConeQuad {
  ConeSpec alpha1;  // sub, below everything
  ConeSpec beta1;   // super
  ConeSpec alpha2;  // sub
  ConeSpec beta2;   // super, above everything
  std::vector<ConeSpec> as_list() const { return {alpha1, beta1, alpha2, beta2}; }
};

struct PathState {
  std::vector<FeFunction> nodes;
  std::vector<double> energies;
  std::vector<char> in_s;                      // S_gamma mask
  std::vector<std::array<double, 4>> dist;     // to alpha1, beta1, alpha2, beta2
  int max_node = -1;                           // argmax of J over S_gamma
  double level = 0.0;                          // max of J over S_gamma
};

enum class MountainPassStatus { Found, NoSolution, RegionViolation };
std::string to_string(MountainPassStatus s);

struct Localization {
  double dist_alpha1 = 0.0;
  double dist_beta2 = 0.0;
  double dist_alpha2 = 0.0;
  double dist_beta1 = 0.0;
  double tol = 0.0;
  bool ok = false;  // inside both outer cones, outside both half-enlarged inner ones
};

struct MountainPassResult {
  MountainPassStatus status = MountainPassStatus::NoSolution;
  std::string message;
  FeFunction u3;
  double level = 0.0;        // final max over S_gamma before refinement
  double energy_u3 = 0.0;
  double residual = 0.0;
  std::vector<double> levels;  // per outer iteration
  double max_level_increase = 0.0;
  bool level_monotone = true;
  int outer_iterations = 0;
  int newton_iterations = 0;
  double pg_at_switch = 0.0;
  Localization location;
  double lower_bound = 0.0;   // min of J(u1), J(u2) and sampled ambient points
  bool lower_bound_ok = false;
  PathState path;
};

struct MountainPassInput {
  ConeQuad cones;
  FeFunction u1;    // in C_alpha1 and C^beta1
  FeFunction u2;    // in C_alpha2 and C^beta2
  FeFunction bump;  // optional, added as sin(pi s) * bump to the initial segment
};

/// Path-based min-max between u1 and u2 inside the ambient cones, followed by
/// Newton refinement of the max node. `on_outer` (optional) sees the path
/// after every outer iteration.
MountainPassResult mountain_pass(const MountainPassInput& in, const NonlinearitySpec& spec,
                                 const MinmaxConfig& cfg, const NewtonConfig& newton,
                                 const std::function<void(int, const PathState&)>& on_outer = {});

/// Classification used for reports: "zero", "positive", "negative", "sign-changing".
std::string sign_class(const FeFunction& u, double threshold = 1e-3);

/// (N - 2 + sqrt(9N^2 - 4N + 4)) / (2N).
double sign_changing_threshold(int N);

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct FourSolutionsConfig {
  NewtonConfig newton;
  MinmaxConfig minmax;
  MonotoneConfig monotone;
  double eig_tol = 1e-10;
  double l_fraction = 0.25;    // l = l_fraction * l_bar
  double eps_fraction = 0.5;   // eps_bar = eps_fraction * estimated separation radius
  double bump_scale = 0.5;     // sup of the initial bump relative to max(|u1|, |u2|)
  double residual_target = 1e-8;
  int hypothesis_budget = 2000;
  std::uint64_t seed = 1;
  std::function<void(int, const PathState&)> on_outer;  // forwarded to mountain_pass
};

struct SolutionReport {
  std::string name;
  FeFunction u;
  double residual = 0.0;
  double energy = 0.0;
  std::string sign;
};

struct CertificateRecord {
  std::string cone;
  InvarianceCertificate certificate;
};

/// Everything up to the third solution: eigenpairs, the four cones, their
/// certificates and the separation radius.
struct ConeSetup {
  EigenResult eig;
  LadderParams ladder;
  double mu = 0.0;
  double threshold = 0.0;
  bool threshold_ok = false;
  NonlinearitySpec spec;  // input spec with M raised to make h monotone on the cone range
  ConeQuad cones;
  std::vector<CertificateRecord> certificates;   // every applicable branch tried
  std::array<std::string, 4> certified_branch;   // first satisfied branch per cone, or empty
  double eps_bar = 0.0;
};

/// Stages eigen, threshold, hypotheses, ladder, alpha1_beta2, certificates and
/// cones_disjoint. With `require_certificates` false a cone without a
/// satisfied branch is recorded instead of raising.
ConeSetup setup_cones(const NonlinearitySpec& spec, const MeshPtr& mesh,
                      const FourSolutionsConfig& cfg, const EigenResult* eig = nullptr,
                      bool require_certificates = true);

struct FourSolutionsResult {
  ConeSetup setup;
  int steps_u1 = 0;
  int steps_u2 = 0;
  MountainPassResult mp;
  std::vector<SolutionReport> solutions;  // trivial, positive, negative, sign-changing
  double min_pairwise_l2 = 0.0;
};

/// setup_cones, monotone iterations for u1 and u2, mountain pass for u3.
/// Stage failures raise StageError. `eig` may carry a precomputed eigen
/// solve on the same mesh.
FourSolutionsResult four_solutions(const NonlinearitySpec& spec, const MeshPtr& mesh,
                                   const FourSolutionsConfig& cfg,
                                   const EigenResult* eig = nullptr);

}  // namespace conewalk
