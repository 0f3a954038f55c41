#pragma once

#include "conewalk/grid.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace conewalk {

/// |t|^(p-2) t with the convention 0 at t = 0.
double phi_p(double t, double p);

/// Critical Sobolev exponent Np/(N-p), or +inf when p >= N.
double sobolev_exponent(double p, int N);

/// Nonlinearity f(x,t) with its primitive and the constants of the growth,
/// monotonicity and asymptotic hypotheses. Handles must be pure.
struct NonlinearitySpec {
  using Scalar2 = std::function<double(Point, double)>;

  std::string catalog_id;
  double p = 2.0;
  DomainSpec domain;
  Scalar2 f;
  Scalar2 F;
  Scalar2 df;  // optional: partial derivative in t

  double q = 2.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double M = 0.0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double R = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();

  /// Catalog parameters, kept for reports.
  double param_lambda = 0.0;
  double param_delta = 1.0;

  int dimension() const { return domain.dimension(); }
  double f_of(Point x, double t) const { return f(x, t); }
  double F_of(Point x, double t) const { return F(x, t); }
  /// df if present, otherwise a central difference.
  double df_of(Point x, double t) const;

  /// Copy with the (f4) constants set; for `saturating` R is derived from mu.
  NonlinearitySpec with_mu(double mu_value) const;
  NonlinearitySpec with_M(double M_value) const;

  /// Throws ParameterError unless 1 < q < p* and p > 1.
  void validate() const;

  /// lambda |t|^(p-2) t.
  static NonlinearitySpec linear(double p, double lambda, const DomainSpec& domain);
  /// lambda |t|^(p-2) t / (1 + |t/delta|^(p-1)).
  static NonlinearitySpec saturating(double p, double lambda, double delta,
                                     const DomainSpec& domain);
  /// lambda |t|^(p-2) t - g(x).
  static NonlinearitySpec affine_forcing(double p, double lambda, std::function<double(Point)> g,
                                         double g_sup, const DomainSpec& domain);
  /// Arbitrary handles for programmatic use (tests, experiments).
  static NonlinearitySpec custom(double p, Scalar2 f, Scalar2 F, Scalar2 df, double q, double c1,
                                 double c2, const DomainSpec& domain);
};

/// h(x,t) = f(x,t) + M |t|^(p-2) t.
double h_eval(const NonlinearitySpec& spec, Point x, double t);

enum class HypothesisStatus { VerifiedOnSamples, Violated, NotChecked };

std::string to_string(HypothesisStatus s);

struct HypothesisEntry {
  std::string name;
  HypothesisStatus status = HypothesisStatus::NotChecked;
  // Witness for a violation; meaningful only when status == Violated.
  Point x;
  double t = 0.0;
  double t2 = 0.0;
  double value = 0.0;
  double bound = 0.0;
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;  // f1 .. f5 in order
  const HypothesisEntry& get(const std::string& name) const;
  bool all_verified() const;
};

HypothesisReport check_hypotheses(const NonlinearitySpec& spec, int sample_budget,
                                  std::uint64_t seed = 1);

/// Smallest M >= 0 making h nondecreasing on |t| <= t_max, from sampled
/// -f'(t) / ((p-1)|t|^(p-2)).
double estimate_M(const NonlinearitySpec& spec, double t_max, int samples = 400);

}  // namespace conewalk
