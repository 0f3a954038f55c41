#include "conewalk/cones.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conewalk {

std::string to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::Satisfied:
      return "satisfied";
    case CertificateStatus::Violated:
      return "violated";
    case CertificateStatus::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::L1Sub:
      return "l1_sub";
    case Branch::LrSuper:
      return "lr_super";
    case Branch::SupSub:
      return "sup_sub";
    case Branch::SupSuper:
      return "sup_super";
    case Branch::SupSuperQ:
      return "sup_super_q";
  }
  return "unknown";
}

Branch parse_branch(const std::string& s) {
  for (Branch b : {Branch::L1Sub, Branch::LrSuper, Branch::SupSub, Branch::SupSuper, Branch::SupSuperQ}) {
    if (s == to_string(b)) {
      return b;
    }
  }
  throw ParameterError("unknown certificate branch '" + s + "'");
}

const std::vector<int>& certificate_levels() {
  static const std::vector<int> levels{64, 128, 256};
  return levels;
}

namespace {

struct Rule1D {
  std::vector<double> anchor;  // nearest end of the interval
  std::vector<double> offset;  // signed offset from the anchor
  std::vector<double> w;
};

// Gauss points on [a, b] graded geometrically toward both ends: layers of
// width (b-a)/2 * 2^-(j+1), j < layers; the two innermost cells are dropped.
Rule1D graded_rule(double a, double b, int layers, int sub) {
  using G = boost::math::quadrature::gauss<double, 5>;
  const auto& abs = G::abscissa();
  const auto& wts = G::weights();
  Rule1D r;
  const double half = 0.5 * (b - a);
  // Panel [lo, hi] in distance from the end `end` (direction dir = +-1).
  const auto add_panel = [&](double end, double dir, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < abs.size(); ++k) {
      for (double sgn : {-1.0, 1.0}) {
        if (abs[k] == 0.0 && sgn > 0.0) {
          continue;
        }
        r.anchor.push_back(end);
        r.offset.push_back(dir * (c + sgn * h * abs[k]));
        r.w.push_back(h * wts[k]);
      }
    }
  };
  for (int j = 0; j < layers; ++j) {
    const double t0 = std::ldexp(half, -(j + 1));
    const double t1 = std::ldexp(half, -j);
    for (int s = 0; s < sub; ++s) {
      const double lo = t0 + (t1 - t0) * s / sub;
      const double hi = t0 + (t1 - t0) * (s + 1) / sub;
      add_panel(a, 1.0, lo, hi);
      add_panel(b, -1.0, lo, hi);
    }
  }
  return r;
}

template <class Reduce>
double graded_apply(const DomainSpec& domain, const std::function<double(const SamplePoint&)>& g,
                    int layers, double init, Reduce reduce) {
  if (domain.dimension() == 1) {
    const Rule1D r = graded_rule(domain.x0, domain.x1, layers, 4);
    double acc = init;
    for (std::size_t k = 0; k < r.w.size(); ++k) {
      const SamplePoint sp{{r.anchor[k], 0.0}, {r.offset[k], 0.0}, std::abs(r.offset[k])};
      acc = reduce(acc, g(sp), r.w[k]);
    }
    return acc;
  }
  const Rule1D r = graded_rule(0.0, 1.0, layers, 1);
  const auto n = static_cast<std::ptrdiff_t>(r.w.size());
  // Per-row partials, combined in a fixed order for reproducibility.
  std::vector<double> rows(r.w.size(), init);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = init;
    for (std::size_t k = 0; k < r.w.size(); ++k) {
      const SamplePoint sp{{r.anchor[i], r.anchor[k]},
                           {r.offset[i], r.offset[k]},
                           std::min(std::abs(r.offset[i]), std::abs(r.offset[k]))};
      acc = reduce(acc, g(sp), r.w[i] * r.w[k]);
    }
    rows[i] = acc;
  }
  double acc = init;
  for (double v : rows) {
    acc = reduce(acc, v, 1.0);
  }
  return acc;
}

}  // namespace

double graded_integral(const DomainSpec& domain,
                       const std::function<double(const SamplePoint&)>& g, int layers) {
  return graded_apply(domain, g, layers, 0.0,
                      [](double acc, double v, double w) { return acc + w * v; });
}

double graded_sup(const DomainSpec& domain, const std::function<double(const SamplePoint&)>& g,
                  int layers) {
  return graded_apply(domain, g, layers, -std::numeric_limits<double>::infinity(),
                      [](double acc, double v, double) {
                        return std::isnan(v) ? v : std::max(acc, v);
                      });
}

CertificateStatus classify_levels(const std::vector<double>& values, double* growth) {
  if (growth) {
    *growth = 0.0;
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      return CertificateStatus::Violated;
    }
  }
  const double last = values.back();
  bool agree = true;
  for (double v : values) {
    agree = agree && std::abs(v - last) <= 0.05 * std::abs(last);
  }
  if (values.size() >= 3) {
    const std::size_t n = values.size();
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    const double ratio = d1 != 0.0 ? d2 / d1 : 0.0;
    if (growth) {
      *growth = ratio;
    }
    if (!agree && ratio >= 1.9) {
      return CertificateStatus::Violated;
    }
  }
  return agree ? CertificateStatus::Satisfied : CertificateStatus::Inconclusive;
}

double l1_sub_exponent(double p, int N) {
  const double ps = sobolev_exponent(p, N);
  const double factor = std::isinf(ps) ? 1.0 : ps / (ps - 2.0);
  return (2.0 - p) / (p - 1.0) * factor;
}

double lr_super_exponent(double p, int N) {
  if (p < static_cast<double>(N)) {
    return (p - 2.0) * N / p;
  }
  if (p == static_cast<double>(N)) {
    return 2.0 * (p - 2.0);
  }
  return p - 2.0;
}

InvarianceCertificate check_invariance_certificate(const ConeSpec& cone,
                                                   const NonlinearitySpec& spec, Branch which) {
  if (!cone.strict) {
    throw ParameterError("certificates require a strict cone");
  }
  const double p = spec.p;
  const int N = spec.dimension();
  const double Nd = N;
  const double ps = sobolev_exponent(p, N);
  const double q = spec.q;
  // q-threshold p* - p/(N-p); vacuous when p >= N.
  const double q_cut = p < Nd ? ps - p / (Nd - p) : std::numeric_limits<double>::infinity();

  InvarianceCertificate cert;
  cert.branch = which;
  cert.levels = certificate_levels();
  const auto mismatch = [&](const std::string& why) {
    throw ParameterError("branch " + to_string(which) + " does not apply: " + why);
  };
  // Integrand in terms of the remainder value a and the boundary distance d.
  std::function<double(double, double)> integrand;
  switch (which) {
    case Branch::L1Sub: {
      const double lo = 2.0 * Nd / (Nd + 2.0);
      if (!(p >= lo && p < 2.0) || (N == 2 && p == lo)) {
        mismatch("needs 2N/(N+2) <= p < 2 (strict for N = 2)");
      }
      if (!std::isinf(ps) && ps == 2.0) {
        cert.sup_norm = true;
        cert.exponent = 1.0;
      } else {
        cert.exponent = l1_sub_exponent(p, N);
      }
      const double s = cert.exponent;
      integrand = [s](double a, double) { return std::pow(1.0 / a, s); };
      break;
    }
    case Branch::LrSuper: {
      if (p < 2.0) {
        mismatch("needs p >= 2");
      }
      if (p == 2.0) {
        cert.status = CertificateStatus::Satisfied;
        cert.levels.clear();
        cert.note = "p = 2: no integrability condition";
        return cert;
      }
      cert.exponent = lr_super_exponent(p, N);
      if (p == Nd) {
        cert.note = "p = N: r = 2(p-2) chosen";
      }
      const double r = cert.exponent;
      integrand = [r](double a, double) { return std::pow(1.0 / a, r); };
      break;
    }
    case Branch::SupSub: {
      const double lo = 2.0 * Nd / (Nd + 1.0);
      if (!(p >= lo && p < 2.0) || (N == 2 && p == lo)) {
        mismatch("needs 2N/(N+1) <= p < 2 (strict for N = 2)");
      }
      if (!(q <= q_cut)) {
        mismatch("needs q <= p* - p/(N-p)");
      }
      cert.sup_norm = true;
      cert.exponent = (2.0 - p) / (p - 1.0);
      cert.dist_exponent = 1.0;
      const double e = cert.exponent;
      integrand = [e](double a, double d) { return d / std::pow(a, e); };
      break;
    }
    case Branch::SupSuper: {
      if (!(p > 2.0)) {
        mismatch("needs p > 2");
      }
      if (!((p >= Nd && N > 2) || q <= q_cut)) {
        mismatch("needs p >= N > 2 or q <= p* - p/(N-p)");
      }
      cert.sup_norm = true;
      cert.exponent = p - 2.0;
      cert.dist_exponent = p;
      integrand = [p](double a, double d) { return std::pow(d, p) / std::pow(a, p - 2.0); };
      break;
    }
    case Branch::SupSuperQ: {
      if (!(p > 2.0 && p < Nd && q > q_cut && q < ps)) {
        mismatch("needs 2 < p < N and p* - p/(N-p) < q < p*");
      }
      cert.sup_norm = true;
      cert.exponent = p - 2.0;
      cert.dist_exponent = p + Nd + q - 1.0 - Nd * q / p;
      const double de = cert.dist_exponent;
      integrand = [p, de](double a, double d) { return std::pow(d, de) / std::pow(a, p - 2.0); };
      break;
    }
  }

  const DomainSpec& dom = spec.domain;
  const auto g = [&](const SamplePoint& x) {
    const double a = cone.remainder_at(x);
    if (!(a > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    return integrand(a, x.dist);
  };
  for (int K : cert.levels) {
    cert.values.push_back(cert.sup_norm ? graded_sup(dom, g, K) : graded_integral(dom, g, K));
  }
  cert.status = classify_levels(cert.values, &cert.growth_ratio);
  return cert;
}

}  // namespace conewalk
