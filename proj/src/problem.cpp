#include "conewalk/problem.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace conewalk {

double phi_p(double t, double p) {
  if (t == 0.0) {
    return 0.0;
  }
  return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

double sobolev_exponent(double p, int N) {
  if (p >= N) {
    return std::numeric_limits<double>::infinity();
  }
  return N * p / (N - p);
}

double NonlinearitySpec::df_of(Point x, double t) const {
  if (df) {
    return df(x, t);
  }
  const double step = 1e-6 * std::max(1.0, std::abs(t));
  return (f(x, t + step) - f(x, t - step)) / (2.0 * step);
}

NonlinearitySpec NonlinearitySpec::with_mu(double mu_value) const {
  NonlinearitySpec out = *this;
  out.mu = mu_value;
  if (catalog_id == "saturating" && mu_value > 0.0 && mu_value < param_lambda) {
    out.R = param_delta * std::pow(param_lambda / mu_value - 1.0, 1.0 / (p - 1.0));
  }
  return out;
}

NonlinearitySpec NonlinearitySpec::with_M(double M_value) const {
  if (M_value < 0.0) {
    throw ParameterError("M must be nonnegative");
  }
  NonlinearitySpec out = *this;
  out.M = M_value;
  return out;
}

void NonlinearitySpec::validate() const {
  if (!(p > 1.0)) {
    throw ParameterError("p must exceed 1");
  }
  const double pstar = sobolev_exponent(p, dimension());
  if (!(q > 1.0 && q < pstar)) {
    throw ParameterError("growth exponent q must satisfy 1 < q < p*");
  }
  if (!f || !F) {
    throw ParameterError("nonlinearity handles f and F are required");
  }
}

NonlinearitySpec NonlinearitySpec::linear(double p, double lambda, const DomainSpec& domain) {
  NonlinearitySpec s;
  s.catalog_id = "linear";
  s.p = p;
  s.domain = domain;
  s.f = [p, lambda](Point, double t) { return lambda * phi_p(t, p); };
  s.F = [p, lambda](Point, double t) { return lambda * std::pow(std::abs(t), p) / p; };
  s.df = [p, lambda](Point, double t) {
    if (t == 0.0) {
      return p == 2.0 ? lambda : (p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
    return lambda * (p - 1.0) * std::pow(std::abs(t), p - 2.0);
  };
  s.q = p;
  s.c1 = 0.0;
  s.c2 = std::abs(lambda);
  // The quotient is identically lambda: (f4) holds with mu = lambda for any R.
  s.mu = lambda;
  s.R = 0.0;
  s.lambda = lambda;
  s.param_lambda = lambda;
  return s;
}

namespace {

// integral_0^x y^(p-1) / (1 + y^(p-1)) dy.
double saturating_primitive(double x, double p) {
  if (x == 0.0) {
    return 0.0;
  }
  if (p == 2.0) {
    if (x < 1e-2) {
      double term = x * x / 2.0, sum = 0.0, sign = 1.0, pw = x * x;
      for (int k = 2; k < 12; ++k) {
        term = pw / k;
        sum += sign * term;
        sign = -sign;
        pw *= x;
      }
      return sum;
    }
    return x - std::log1p(x);
  }
  if (p == 3.0) {
    if (x < 1e-2) {
      const double x2 = x * x;
      double pw = x * x2, sum = 0.0, sign = 1.0;
      for (int k = 3; k < 21; k += 2) {
        sum += sign * pw / k;
        sign = -sign;
        pw *= x2;
      }
      return sum;
    }
    return x - std::atan(x);
  }
  // Substitute y = x w^n so the integrand vanishes smoothly at w = 0.
  const int n = static_cast<int>(std::ceil(8.0 / (p - 1.0)));
  const auto integrand = [x, p, n](double w) {
    const double y = x * std::pow(w, n);
    const double ypm = std::pow(y, p - 1.0);
    return ypm / (1.0 + ypm) * x * n * std::pow(w, n - 1);
  };
  constexpr int panels = 4;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    sum += boost::math::quadrature::gauss<double, 20>::integrate(
        integrand, static_cast<double>(k) / panels, static_cast<double>(k + 1) / panels);
  }
  return sum;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::saturating(double p, double lambda, double delta,
                                              const DomainSpec& domain) {
  if (!(delta > 0.0)) {
    throw ParameterError("saturating requires delta > 0");
  }
  NonlinearitySpec s;
  s.catalog_id = "saturating";
  s.p = p;
  s.domain = domain;
  s.f = [p, lambda, delta](Point, double t) {
    const double x = std::abs(t) / delta;
    return lambda * phi_p(t, p) / (1.0 + std::pow(x, p - 1.0));
  };
  s.F = [p, lambda, delta](Point, double t) {
    return lambda * std::pow(delta, p) * saturating_primitive(std::abs(t) / delta, p);
  };
  s.df = [p, lambda, delta](Point, double t) {
    const double x = std::abs(t) / delta;
    if (x == 0.0) {
      return p == 2.0 ? lambda : (p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
    const double xpm = std::pow(x, p - 1.0);
    return lambda * std::pow(delta, p - 2.0) * (p - 1.0) * std::pow(x, p - 2.0) /
           ((1.0 + xpm) * (1.0 + xpm));
  };
  s.q = p;
  s.c1 = std::abs(lambda) * std::pow(delta, p - 1.0);
  s.c2 = 0.0;
  s.lambda = lambda;
  s.param_lambda = lambda;
  s.param_delta = delta;
  return s.with_mu(lambda / 8.0);
}

NonlinearitySpec NonlinearitySpec::affine_forcing(double p, double lambda,
                                                  std::function<double(Point)> g, double g_sup,
                                                  const DomainSpec& domain) {
  NonlinearitySpec s;
  s.catalog_id = "affine_forcing";
  s.p = p;
  s.domain = domain;
  s.f = [p, lambda, g](Point x, double t) { return lambda * phi_p(t, p) - g(x); };
  s.F = [p, lambda, g](Point x, double t) {
    return lambda * std::pow(std::abs(t), p) / p - g(x) * t;
  };
  s.df = [p, lambda](Point, double t) {
    if (t == 0.0) {
      return p == 2.0 ? lambda : (p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
    return lambda * (p - 1.0) * std::pow(std::abs(t), p - 2.0);
  };
  s.q = p;
  s.c1 = std::abs(g_sup);
  s.c2 = std::abs(lambda);
  s.param_lambda = lambda;
  return s;
}

NonlinearitySpec NonlinearitySpec::custom(double p, Scalar2 f, Scalar2 F, Scalar2 df, double q,
                                          double c1, double c2, const DomainSpec& domain) {
  NonlinearitySpec s;
  s.catalog_id = "custom";
  s.p = p;
  s.domain = domain;
  s.f = std::move(f);
  s.F = std::move(F);
  s.df = std::move(df);
  s.q = q;
  s.c1 = c1;
  s.c2 = c2;
  return s;
}

double h_eval(const NonlinearitySpec& spec, Point x, double t) {
  return spec.f(x, t) + spec.M * phi_p(t, spec.p);
}

std::string to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::VerifiedOnSamples:
      return "verified-on-samples";
    case HypothesisStatus::Violated:
      return "violated";
    case HypothesisStatus::NotChecked:
      return "not-checked";
  }
  return "unknown";
}

const HypothesisEntry& HypothesisReport::get(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) {
      return e;
    }
  }
  throw ParameterError("unknown hypothesis " + name);
}

bool HypothesisReport::all_verified() const {
  return std::all_of(entries.begin(), entries.end(), [](const HypothesisEntry& e) {
    return e.status == HypothesisStatus::VerifiedOnSamples;
  });
}

namespace {

std::vector<Point> sample_points(const DomainSpec& domain, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts;
  if (domain.dimension() == 1) {
    pts.push_back({0.5 * (domain.x0 + domain.x1), 0.0});
    for (int i = 1; i < count; ++i) {
      pts.push_back({domain.x0 + unit(rng) * (domain.x1 - domain.x0), 0.0});
    }
  } else {
    pts.push_back({0.5, 0.5});
    for (int i = 1; i < count; ++i) {
      pts.push_back({unit(rng), unit(rng)});
    }
  }
  return pts;
}

}  // namespace

HypothesisReport check_hypotheses(const NonlinearitySpec& spec, int sample_budget,
                                  std::uint64_t seed) {
  if (sample_budget < 100) {
    throw ParameterError("check_hypotheses needs sample_budget >= 100");
  }
  const double p = spec.p;
  std::mt19937_64 rng(seed);
  const int n_points = 4;
  const auto xs = sample_points(spec.domain, n_points, rng);

  // Log-spaced magnitudes of both signs plus uniform random values.
  const int per_point = std::max(25, sample_budget / n_points);
  const int n_log = per_point / 2;
  std::vector<double> ts{0.0};
  for (int k = 0; k < n_log; ++k) {
    const double mag = std::pow(10.0, -6.0 + 9.0 * k / std::max(1, n_log - 1));
    ts.push_back(mag);
    ts.push_back(-mag);
  }
  std::uniform_real_distribution<double> wide(-10.0, 10.0);
  for (int k = 0; k < per_point - n_log; ++k) {
    ts.push_back(wide(rng));
  }
  std::sort(ts.begin(), ts.end());

  HypothesisReport report;

  // (f1) growth bound and q < p*.
  {
    HypothesisEntry e;
    e.name = "f1";
    e.status = HypothesisStatus::VerifiedOnSamples;
    const double pstar = sobolev_exponent(p, spec.dimension());
    if (!(spec.q > 1.0 && spec.q < pstar)) {
      e.status = HypothesisStatus::Violated;
      e.value = spec.q;
      e.bound = pstar;
      e.note = "q outside (1, p*)";
    }
    for (const Point& x : xs) {
      for (double t : ts) {
        if (e.status == HypothesisStatus::Violated) {
          break;
        }
        const double val = std::abs(spec.f(x, t));
        const double bound = spec.c1 + spec.c2 * std::pow(std::abs(t), spec.q - 1.0);
        if (!(val <= bound * (1.0 + 1e-9) + 1e-12)) {
          e.status = HypothesisStatus::Violated;
          e.x = x;
          e.t = t;
          e.value = val;
          e.bound = bound;
          e.note = "|f| exceeds c1 + c2|t|^(q-1)";
        }
      }
    }
    report.entries.push_back(e);
  }

  // (f2) local Lipschitz (p >= 2) or (p-1)-Hoelder (p < 2) ratio on |t| <= 10.
  {
    HypothesisEntry e;
    e.name = "f2";
    e.status = HypothesisStatus::VerifiedOnSamples;
    const double expo = p >= 2.0 ? 1.0 : p - 1.0;
    const double ratio_cap = 1e8;
    double worst = 0.0;
    for (const Point& x : xs) {
      for (double t : ts) {
        if (std::abs(t) > 10.0) {
          continue;
        }
        for (double d : {1e-3, 1e-2, 1e-1, 1.0}) {
          const double ratio = std::abs(spec.f(x, t + d) - spec.f(x, t)) / std::pow(d, expo);
          if (!std::isfinite(ratio) || ratio > ratio_cap) {
            if (e.status != HypothesisStatus::Violated) {
              e.status = HypothesisStatus::Violated;
              e.x = x;
              e.t = t;
              e.t2 = t + d;
              e.value = ratio;
              e.bound = ratio_cap;
              e.note = "difference quotient unbounded";
            }
          } else {
            worst = std::max(worst, ratio);
          }
        }
      }
    }
    if (e.status != HypothesisStatus::Violated) {
      e.value = worst;
      e.note = "max sampled ratio";
    }
    report.entries.push_back(e);
  }

  // (f3) h nondecreasing along the sorted grid.
  {
    HypothesisEntry e;
    e.name = "f3";
    e.status = HypothesisStatus::VerifiedOnSamples;
    for (const Point& x : xs) {
      double prev = h_eval(spec, x, ts.front());
      for (std::size_t k = 1; k < ts.size() && e.status != HypothesisStatus::Violated; ++k) {
        const double cur = h_eval(spec, x, ts[k]);
        if (cur < prev - 1e-12 * (1.0 + std::abs(prev))) {
          e.status = HypothesisStatus::Violated;
          e.x = x;
          e.t = ts[k - 1];
          e.t2 = ts[k];
          e.value = cur;
          e.bound = prev;
          e.note = "h decreases between t and t2";
        }
        prev = cur;
      }
    }
    report.entries.push_back(e);
  }

  // (f4) asymptotic quotient bound for |t| > R.
  {
    HypothesisEntry e;
    e.name = "f4";
    if (std::isnan(spec.mu) || std::isnan(spec.R)) {
      e.status = HypothesisStatus::NotChecked;
      e.note = "mu or R not set";
    } else {
      e.status = HypothesisStatus::VerifiedOnSamples;
      std::vector<double> big;
      for (int k = 1; k <= 60; ++k) {
        const double mag = (spec.R > 0.0 ? spec.R : 1e-3) * std::pow(10.0, 6.0 * k / 60.0);
        big.push_back(mag);
        big.push_back(-mag);
      }
      for (const Point& x : xs) {
        for (double t : big) {
          const double quot = spec.f(x, t) / phi_p(t, p);
          if (!(quot <= spec.mu * (1.0 + 1e-12) + 1e-14) &&
              e.status != HypothesisStatus::Violated) {
            e.status = HypothesisStatus::Violated;
            e.x = x;
            e.t = t;
            e.value = quot;
            e.bound = spec.mu;
            e.note = "quotient above mu beyond R";
          }
        }
      }
    }
    report.entries.push_back(e);
  }

  // (f5) quotient near zero against lambda within 5%.
  {
    HypothesisEntry e;
    e.name = "f5";
    if (std::isnan(spec.lambda)) {
      e.status = HypothesisStatus::NotChecked;
      e.note = "lambda not set";
    } else {
      e.status = HypothesisStatus::VerifiedOnSamples;
      for (const Point& x : xs) {
        for (double t : {1e-4, -1e-4}) {
          const double quot = spec.f(x, t) / phi_p(t, p);
          const double tol = 0.05 * std::abs(spec.lambda);
          if (!(std::abs(quot - spec.lambda) <= tol) && e.status != HypothesisStatus::Violated) {
            e.status = HypothesisStatus::Violated;
            e.x = x;
            e.t = t;
            e.value = quot;
            e.bound = spec.lambda;
            e.note = "quotient at |t|=1e-4 differs from lambda by more than 5%";
          }
        }
      }
    }
    report.entries.push_back(e);
  }

  return report;
}

double estimate_M(const NonlinearitySpec& spec, double t_max, int samples) {
  if (!(t_max > 0.0) || samples < 2) {
    throw ParameterError("estimate_M needs t_max > 0 and at least 2 samples");
  }
  const double p = spec.p;
  const Point x = spec.domain.dimension() == 1
                      ? Point{0.5 * (spec.domain.x0 + spec.domain.x1), 0.0}
                      : Point{0.5, 0.5};
  double M = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double mag = t_max * std::pow(10.0, -6.0 * k / (samples - 1));
    for (double t : {mag, -mag}) {
      const double denom = (p - 1.0) * std::pow(std::abs(t), p - 2.0);
      const double need = -spec.df_of(x, t) / denom;
      if (std::isfinite(need)) {
        M = std::max(M, need);
      }
    }
  }
  return M;
}

}  // namespace conewalk
