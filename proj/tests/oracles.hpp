#pragma once

// Independent reference computations. Nothing here calls into the library.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double phi(double t, double p) {
  return t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

/// First positive zero of the solution of (phi_p(u'))' + lambda phi_p(u) = 0,
/// u(0) = 0, u'(0) = 1, by classical RK4 in the variables (u, w = phi_p(u')).
inline double first_zero(double p, double lambda, double dx = 1e-6) {
  const double q = 1.0 / (p - 1.0);
  const auto rhs = [&](double u, double w, double& du, double& dw) {
    du = phi(w, q + 1.0);  // inverse of phi_p
    dw = -lambda * phi(u, p);
  };
  double x = 0.0;
  double u = 0.0;
  double w = 1.0;
  bool rising = true;
  while (true) {
    double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    rhs(u, w, k1u, k1w);
    rhs(u + 0.5 * dx * k1u, w + 0.5 * dx * k1w, k2u, k2w);
    rhs(u + 0.5 * dx * k2u, w + 0.5 * dx * k2w, k3u, k3w);
    rhs(u + dx * k3u, w + dx * k3w, k4u, k4w);
    const double un = u + dx / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    const double wn = w + dx / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    if (rising && wn < 0.0) {
      rising = false;
    }
    if (!rising && un <= 0.0) {
      return x + dx * u / (u - un);
    }
    x += dx;
    u = un;
    w = wn;
  }
}

/// k-th Dirichlet eigenvalue of the 1D p-Laplacian on (0, 1) by shooting:
/// the first zero scales like lambda^(-1/p), and the k-th eigenfunction is the
/// first one on (0, 1/k) continued by odd reflection.
inline double shooting_eigenvalue(double p, int k) {
  const double lam = 1.0;
  const double z = first_zero(p, lam, 1e-5);
  return lam * std::pow(k * z, p);
}

/// Solves -w'' - c w = load on (0,1), w(0) = w(1) = 0, with second-order finite
/// differences on `cells` cells (Thomas algorithm). Returns nodal values.
inline std::vector<double> dense_linear(double c, const std::function<double(double)>& load,
                                        int cells) {
  const int n = cells - 1;
  const double h = 1.0 / cells;
  std::vector<double> a(n, -1.0), b(n, 2.0 - c * h * h), d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = h * h * load((i + 1) * h);
  }
  std::vector<double> cp(n), dp(n);
  cp[0] = a[0] / b[0];
  dp[0] = d[0] / b[0];
  for (int i = 1; i < n; ++i) {
    const double m = b[i] - a[i] * cp[i - 1];
    cp[i] = a[i] / m;
    dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
  }
  std::vector<double> w(cells + 1, 0.0);
  w[n] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    w[i + 1] = dp[i] - cp[i] * w[i + 2];
  }
  return w;
}

/// Linear interpolation of nodal values on a uniform grid of (0,1).
inline double sample(const std::vector<double>& w, double x) {
  const int cells = static_cast<int>(w.size()) - 1;
  const double s = x * cells;
  const int i = std::min(cells - 1, static_cast<int>(s));
  const double t = s - i;
  return (1.0 - t) * w[i] + t * w[i + 1];
}

/// Composite midpoint rule for the integral of g over (a, b).
inline double midpoint(const std::function<double(double)>& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += g(a + (i + 0.5) * h);
  }
  return s * h;
}

}  // namespace oracle
