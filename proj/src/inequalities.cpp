#include "conewalk/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conewalk {

namespace {

using Vec = std::array<double, 3>;

double norm(const Vec& a, int N) {
  double s = 0.0;
  for (int k = 0; k < N; ++k) {
    s += a[k] * a[k];
  }
  return std::sqrt(s);
}

Vec phi_vec(const Vec& a, double p, int N) {
  const double n = norm(a, N);
  Vec out{0.0, 0.0, 0.0};
  if (n == 0.0) {
    return out;
  }
  const double c = std::pow(n, p - 2.0);
  for (int k = 0; k < N; ++k) {
    out[k] = c * a[k];
  }
  return out;
}

Vec random_vec(std::mt19937_64& rng, int N) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  const double scale = std::pow(10.0, expo(rng));
  Vec v{0.0, 0.0, 0.0};
  for (int k = 0; k < N; ++k) {
    v[k] = scale * normal(rng);
  }
  return v;
}

InequalityCheck make(const std::string& name, double p, bool lower, double bound) {
  InequalityCheck c;
  c.name = name;
  c.p = p;
  c.bound = bound;
  c.extreme = lower ? std::numeric_limits<double>::infinity() : 0.0;
  return c;
}

}  // namespace

std::vector<InequalityCheck> check_vector_inequalities(double p, int N, long samples,
                                                       std::mt19937_64& rng, double slack) {
  if (!(p > 1.0) || N < 1 || N > 3) {
    throw ParameterError("vector inequalities need p > 1 and 1 <= N <= 3");
  }
  const bool low = p <= 2.0;
  const bool high = p >= 2.0;
  auto mono_low = make("vector_monotone_p_le_2", p, true, 1.0);
  auto mono_high = make("vector_monotone_p_ge_2", p, true, 1.0);
  auto holder_low = make("vector_holder_p_le_2", p, false, std::pow(2.0, 2.0 - p));
  auto lip_high = make("vector_lipschitz_p_ge_2", p, false, 1.0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  for (long s = 0; s < samples; ++s) {
    const Vec xi = random_vec(rng, N);
    Vec eta;
    const double mode = unit(rng);
    if (mode < 0.1) {
      // antipodal family, where the Hoelder constant is attained
      const double t = std::pow(10.0, 2.0 * sym(rng));
      for (int k = 0; k < 3; ++k) {
        eta[k] = -t * xi[k];
      }
    } else if (mode < 0.2) {
      const double t = sym(rng);
      for (int k = 0; k < 3; ++k) {
        eta[k] = t * xi[k];
      }
    } else {
      eta = random_vec(rng, N);
    }
    Vec diff;
    for (int k = 0; k < 3; ++k) {
      diff[k] = xi[k] - eta[k];
    }
    const double dn = norm(diff, N);
    if (dn == 0.0) {
      continue;
    }
    const Vec a = phi_vec(xi, p, N);
    const Vec b = phi_vec(eta, p, N);
    Vec fd;
    double lhs = 0.0;
    for (int k = 0; k < N; ++k) {
      fd[k] = a[k] - b[k];
      lhs += fd[k] * diff[k];
    }
    const double fdn = norm(fd, N);
    const double sum = norm(xi, N) + norm(eta, N);

    if (low) {
      const double rhs = (p - 1.0) * dn * dn * std::pow(sum, p - 2.0);
      const double ratio = lhs / rhs;
      ++mono_low.samples;
      mono_low.extreme = std::min(mono_low.extreme, ratio);
      if (lhs < rhs * (1.0 - slack)) {
        ++mono_low.failures;
      }
      const double hr = fdn / std::pow(dn, p - 1.0);
      ++holder_low.samples;
      holder_low.extreme = std::max(holder_low.extreme, hr);
      if (hr > holder_low.bound + 1e-9) {
        ++holder_low.failures;
      }
    }
    if (high) {
      const double rhs = std::pow(2.0, 2.0 - p) * std::pow(dn, p);
      ++mono_high.samples;
      mono_high.extreme = std::min(mono_high.extreme, lhs / rhs);
      if (lhs < rhs * (1.0 - slack)) {
        ++mono_high.failures;
      }
      const double lr = (p - 1.0) * std::pow(sum, p - 2.0) * dn;
      ++lip_high.samples;
      lip_high.extreme = std::max(lip_high.extreme, fdn / lr);
      if (fdn > lr * (1.0 + slack)) {
        ++lip_high.failures;
      }
    }
  }
  std::vector<InequalityCheck> out;
  if (low) {
    out.push_back(mono_low);
    out.push_back(holder_low);
  }
  if (high) {
    out.push_back(mono_high);
    out.push_back(lip_high);
  }
  return out;
}

std::vector<InequalityCheck> check_integral_inequalities(double p, const MeshPtr& mesh,
                                                         int samples, std::mt19937_64& rng,
                                                         double slack) {
  if (!(p > 1.0)) {
    throw ParameterError("integral inequalities need p > 1");
  }
  const bool low = p <= 2.0;
  const bool high = p >= 2.0;
  auto mono = make("integral_monotone_p_le_2", p, true, 1.0);
  auto lip = make("integral_lipschitz_p_ge_2", p, false, 1.0);
  const double pprime = p / (p - 1.0);
  const QuadratureRule& rule = QuadratureRule::for_dimension(mesh->dimension());
  const int k = mesh->nodes_per_element();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> expo(-2.0, 2.0);

  for (int s = 0; s < samples; ++s) {
    FeFunction u(mesh), v(mesh);
    if (s % 2 == 0) {
      u = random_field(mesh, rng);
      v = random_field(mesh, rng);
      u *= std::pow(10.0, expo(rng));
      v *= std::pow(10.0, expo(rng));
    } else {
      const double su = std::pow(10.0, expo(rng));
      const double sv = std::pow(10.0, expo(rng));
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = su * normal(rng);
        v[i] = sv * normal(rng);
      }
    }
    double i_mono = 0.0, i_sum = 0.0, i_diff = 0.0, i_phi = 0.0;
    for (const Element& el : mesh->elements()) {
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        double uq = 0.0, vq = 0.0;
        for (int a = 0; a < k; ++a) {
          uq += rule.points[q][a] * u[el.nodes[a]];
          vq += rule.points[q][a] * v[el.nodes[a]];
        }
        const double w = el.volume * rule.weights[q];
        const double dphi = phi_p(uq, p) - phi_p(vq, p);
        i_mono += w * dphi * (uq - vq);
        i_sum += w * std::pow(std::abs(uq) + std::abs(vq), p);
        i_diff += w * std::pow(std::abs(uq - vq), p);
        i_phi += w * std::pow(std::abs(dphi), pprime);
      }
    }
    const double n_sum = std::pow(i_sum, 1.0 / p);
    const double n_diff = std::pow(i_diff, 1.0 / p);
    if (n_diff == 0.0) {
      continue;
    }
    if (low) {
      const double rhs = (p - 1.0) * std::pow(n_sum, p - 2.0) * n_diff * n_diff;
      ++mono.samples;
      mono.extreme = std::min(mono.extreme, i_mono / rhs);
      if (i_mono < rhs * (1.0 - slack)) {
        ++mono.failures;
      }
    }
    if (high) {
      const double lhs = std::pow(i_phi, 1.0 / pprime);
      const double rhs = (p - 1.0) * std::pow(n_sum, p - 2.0) * n_diff;
      ++lip.samples;
      lip.extreme = std::max(lip.extreme, lhs / rhs);
      if (lhs > rhs * (1.0 + slack)) {
        ++lip.failures;
      }
    }
  }
  std::vector<InequalityCheck> out;
  if (low) {
    out.push_back(mono);
  }
  if (high) {
    out.push_back(lip);
  }
  return out;
}

InequalitySweep verify_inequalities(const std::vector<double>& ps, long vector_samples,
                                    int integral_samples, const MeshPtr& mesh,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  InequalitySweep sweep;
  for (double p : ps) {
    for (auto& c : check_vector_inequalities(p, 2, vector_samples, rng)) {
      sweep.total_failures += c.failures;
      sweep.checks.push_back(c);
    }
    for (auto& c : check_integral_inequalities(p, mesh, integral_samples, rng)) {
      sweep.total_failures += c.failures;
      sweep.checks.push_back(c);
    }
  }
  return sweep;
}

PseudogradientStats pseudogradient_constants(const NonlinearitySpec& spec, const MeshPtr& mesh,
                                             int samples, double radius,
                                             const NewtonConfig& cfg, std::mt19937_64& rng) {
  const double p = spec.p;
  std::uniform_real_distribution<double> frac(0.05, 1.0);
  PseudogradientStats st;
  st.descent_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    FeFunction u = random_field(mesh, rng);
    const double n0 = w1p_norm(u, p);
    if (n0 == 0.0) {
      continue;
    }
    u *= radius * frac(rng) / n0;
    const KResult k = k_apply(u, spec, cfg);
    const double nu = w1p_norm(u, p);
    const double nk = w1p_norm(k.v, p);
    st.max_norm_u = std::max(st.max_norm_u, nu);
    st.max_norm_K = std::max(st.max_norm_K, nk);
    if (k.pg_norm < 1e-10) {
      continue;
    }
    const double lower = p <= 2.0 ? k.pg_norm * k.pg_norm * std::pow(nu + nk, p - 2.0)
                                  : std::pow(k.pg_norm, p);
    const double c_desc = k.inner / lower;
    const double dual = residual(u, spec, cfg.parallel).dual_norm;
    const double upper = p <= 2.0 ? std::pow(k.pg_norm, p - 1.0)
                                  : k.pg_norm * std::pow(nu + nk, p - 2.0);
    const double c_res = dual / upper;
    st.descent_min = std::min(st.descent_min, c_desc);
    st.descent_max = std::max(st.descent_max, c_desc);
    st.residual_max = std::max(st.residual_max, c_res);
    ++st.samples;
  }
  return st;
}

}  // namespace conewalk
