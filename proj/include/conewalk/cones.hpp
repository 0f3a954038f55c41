#pragma once

#include "conewalk/eigen.hpp"
#include "conewalk/functional.hpp"
#include "conewalk/problem.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conewalk {

/// Thrown when a sub/supersolution builder cannot produce a valid cone.
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConeKind { Sub, Super };

/// Cone above a subsolution (Sub) or below a supersolution (Super).
struct ConeSpec {
  ConeKind kind = ConeKind::Sub;
  std::string label;
  double p = 2.0;
  FeFunction vertex;
  FeFunction remainder;  // nodal remainder a (Sub) or b (Super)
  /// Pointwise remainder used by certificates; defaults to the P1 interpolant
  /// of `remainder` when empty.
  std::function<double(const SamplePoint&)> remainder_fn;
  bool strict = false;
  double eps = 0.0;  // enlargement radius

  double remainder_at(const SamplePoint& x) const;
  bool is_sub() const { return kind == ConeKind::Sub; }
};

/// Plain cone from a vertex with unknown remainder (strict = false).
ConeSpec make_cone(ConeKind kind, FeFunction vertex, double p, std::string label = {});

/// W^{1,p} norm of [u - alpha]^- (Sub) or [u - beta]^+ (Super).
double cone_distance(const FeFunction& u, const ConeSpec& cone);

/// Nodal max(u, alpha) (Sub) or min(u, beta) (Super).
FeFunction project_plus(const FeFunction& u, const ConeSpec& cone);

/// Exact W^{1,2} projection onto the cone for p = 2 by projected SOR;
/// returns the projection and its distance to u.
std::pair<FeFunction, double> exact_projection_p2(const FeFunction& u, const ConeSpec& cone,
                                                  double tol = 1e-12, int max_sweeps = 100000);

/// Metric W^{1,p} distance from u to the cone (the obstacle problem behind the
/// surrogate), by projected nonlinear SOR on the nodal values. Every sweep
/// lowers the energy of a feasible point, so the result is an upper bound that
/// decreases to the distance; iteration stops early once it drops to `target`.
double metric_distance(const FeFunction& u, const ConeSpec& cone, double target = 0.0,
                       double tol = 1e-12, int max_sweeps = 200000);

struct StrictReport {
  bool strict = false;
  double min = 0.0;
  double median = 0.0;
  FeFunction recovered;  // remainder recovered from the weak residual of the vertex
};

StrictReport verify_strict(const ConeSpec& cone, const NonlinearitySpec& spec);

/// Forcing bound g >= 0 with f(x,t) >= mu|t|^(p-2)t - g(x) for t <= 0
/// (sign = -1) or f(x,t) <= mu|t|^(p-2)t + g(x) for t >= 0 (sign = +1), sampled
/// with a 1% margin.
FeFunction forcing_bound(const NonlinearitySpec& spec, const MeshPtr& mesh, double mu, int sign);

/// Solves -Delta_p w - c|w|^(p-2)w = load with w = boundary_value on the boundary.
FeFunction solve_shifted(const FeFunction& load, double c, double boundary_value, double p,
                         const NewtonConfig& cfg);

/// Strict subsolution alpha1 < 0 with remainder >= (mu - lambda1)/2 |alpha1|^(p-2) alpha1.
ConeSpec build_alpha1(const NonlinearitySpec& spec, const FeFunction& g, double lambda1,
                      double mu, double boundary_depth, const NewtonConfig& cfg);
/// Strict supersolution beta2 > 0, the mirror construction.
ConeSpec build_beta2(const NonlinearitySpec& spec, const FeFunction& g, double lambda1, double mu,
                     double boundary_depth, const NewtonConfig& cfg);

struct LadderParams {
  double t_bar = 0.0;
  double l_bar = 0.0;
  double l = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
};

/// Largest dyadic t_bar where the small-t quotient and derivative bounds hold
/// (1% margin); throws ParameterError when no such t exists.
LadderParams ladder_params(const NonlinearitySpec& spec, const EigenResult& eig);

/// alpha_{2,l} = l phi1 (Sub) and beta_{1,l} = -l phi1 (Super).
std::pair<ConeSpec, ConeSpec> build_ladder(const NonlinearitySpec& spec, const EigenResult& eig,
                                           double l, const LadderParams& params);

// ---------------------------------------------------------------- certificates

enum class CertificateStatus { Satisfied, Violated, Inconclusive };
std::string to_string(CertificateStatus s);

/// Integrability conditions on the remainder: L^1 of a power of 1/a for
/// p < 2, L^r of 1/a for p >= 2, and weighted sup bounds for either range
/// (the _q variant covers large growth exponents q).
enum class Branch { L1Sub, LrSuper, SupSub, SupSuper, SupSuperQ };
std::string to_string(Branch b);
Branch parse_branch(const std::string& s);

struct InvarianceCertificate {
  Branch branch = Branch::L1Sub;
  CertificateStatus status = CertificateStatus::Inconclusive;
  bool sup_norm = false;            // L^inf branch (true) or L^1 integral (false)
  double exponent = 0.0;            // power applied to 1/a, or to a in the denominator
  double dist_exponent = 0.0;       // power of dist in the numerator (L^inf branches)
  std::vector<int> levels;
  std::vector<double> values;       // per refinement level
  double growth_ratio = 0.0;        // (v3 - v2) / (v2 - v1)
  std::string note;
};

/// Boundary-graded quadrature integral (or sup) of g over the domain,
/// with `layers` geometric layers toward the boundary.
double graded_integral(const DomainSpec& domain,
                       const std::function<double(const SamplePoint&)>& g, int layers);
double graded_sup(const DomainSpec& domain, const std::function<double(const SamplePoint&)>& g,
                  int layers);

/// Classifies a refinement table: satisfied when all values agree within 5%,
/// violated on non-finite values or growth ratio >= 1.9, inconclusive otherwise.
CertificateStatus classify_levels(const std::vector<double>& values, double* growth = nullptr);

/// Refinement levels used by the certificates.
const std::vector<int>& certificate_levels();

InvarianceCertificate check_invariance_certificate(const ConeSpec& cone,
                                                   const NonlinearitySpec& spec, Branch which);

/// Exponent helpers for the integral branches.
double l1_sub_exponent(double p, int N);  // (2-p)/(p-1) * p*/(p*-2), factor 1 if p* = inf
double lr_super_exponent(double p, int N);  // r

// ---------------------------------------------------------------- disjointness

struct DisjointReport {
  bool disjoint = false;
  double measure_fraction = 0.0;  // |{alpha > beta + margin}| / |Omega|
  double eps_bar = 0.0;           // largest radius for which the enlargements separate
};

/// Candidate-based estimate of the separation radius between the enlarged
/// cones (bisection over u = theta alpha0 + (1 - theta) beta0).
double estimate_eps_bar(const ConeSpec& sub, const ConeSpec& super);

DisjointReport cones_disjoint_report(const ConeSpec& sub, const ConeSpec& super, double eps,
                                     double min_fraction = 1e-3);
bool cones_disjoint(const ConeSpec& sub, const ConeSpec& super, double eps);

}  // namespace conewalk
