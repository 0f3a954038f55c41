#include "conewalk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace conewalk::kernels {

std::array<double, 2> flux(std::array<double, 2> g, double p, double eps) {
  const double s = g[0] * g[0] + g[1] * g[1] + eps * eps;
  if (s == 0.0) {
    return {0.0, 0.0};
  }
  const double c = std::pow(s, 0.5 * (p - 2.0));
  return {c * g[0], c * g[1]};
}

std::array<double, 4> flux_derivative(std::array<double, 2> g, double p, double eps) {
  const double s = g[0] * g[0] + g[1] * g[1] + eps * eps;
  if (s == 0.0) {
    // Only reachable with eps = 0; the derivative is 0 (p > 2) or unbounded.
    const double d = p > 2.0 ? 0.0 : (p == 2.0 ? 1.0 : 1e300);
    return {d, 0.0, 0.0, d};
  }
  const double c = std::pow(s, 0.5 * (p - 2.0));
  const double c2 = (p - 2.0) * c / s;
  return {c + c2 * g[0] * g[0], c2 * g[0] * g[1], c2 * g[1] * g[0], c + c2 * g[1] * g[1]};
}

namespace {

double element_energy(const Mesh& mesh, std::size_t e, std::span<const double> u, double p,
                      double eps) {
  const auto g = element_gradient(mesh, e, u);
  const double mag2 = g[0] * g[0] + g[1] * g[1];
  if (mag2 == 0.0) {
    return 0.0;
  }
  if (eps == 0.0) {
    return mesh.element(e).volume * std::pow(mag2, 0.5 * p) / p;
  }
  const double e2 = eps * eps;
  // (s^(p/2) - eps^p) written to avoid cancellation when |g| << eps.
  const double val = std::pow(e2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(mag2 / e2));
  return mesh.element(e).volume * val / p;
}

void element_flux(const Mesh& mesh, std::size_t e, std::span<const double> u, double p, double eps,
                  double* local) {
  const Element& el = mesh.element(e);
  const auto a = flux(element_gradient(mesh, e, u), p, eps);
  for (int k = 0; k < mesh.nodes_per_element(); ++k) {
    local[k] = el.volume * (a[0] * el.grad[k][0] + a[1] * el.grad[k][1]);
  }
}

void element_jacobian(const Mesh& mesh, std::size_t e, std::span<const double> u, double p,
                      double eps, double* local) {
  const Element& el = mesh.element(e);
  const auto d = flux_derivative(element_gradient(mesh, e, u), p, eps);
  const int k = mesh.nodes_per_element();
  for (int a = 0; a < k; ++a) {
    const double ga0 = el.grad[a][0], ga1 = el.grad[a][1];
    for (int b = 0; b < k; ++b) {
      const double gb0 = el.grad[b][0], gb1 = el.grad[b][1];
      local[a * 3 + b] =
          el.volume * (ga0 * (d[0] * gb0 + d[1] * gb1) + ga1 * (d[2] * gb0 + d[3] * gb1));
    }
  }
}

void scatter_jacobian(const Mesh& mesh, std::size_t e, const double* local,
                      std::span<double> values) {
  const auto& slot = mesh.pattern().slot[e];
  const int k = mesh.nodes_per_element();
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const int s = slot[a * 3 + b];
      if (s >= 0) {
        values[s] += local[a * 3 + b];
      }
    }
  }
}

}  // namespace

namespace serial {

double gradient_energy(const Mesh& mesh, std::span<const double> u, double p, double eps) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    sum += element_energy(mesh, e, u, p, eps);
  }
  return sum;
}

void flux_residual(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  double local[3];
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    element_flux(mesh, e, u, p, eps, local);
    const Element& el = mesh.element(e);
    for (int k = 0; k < mesh.nodes_per_element(); ++k) {
      out[el.nodes[k]] += local[k];
    }
  }
}

void flux_jacobian(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> values) {
  std::fill(values.begin(), values.end(), 0.0);
  double local[9];
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    element_jacobian(mesh, e, u, p, eps, local);
    scatter_jacobian(mesh, e, local, values);
  }
}

}  // namespace serial

namespace parallel {

double gradient_energy(const Mesh& mesh, std::span<const double> u, double p, double eps) {
  const auto ne = static_cast<std::ptrdiff_t>(mesh.num_elements());
  std::vector<double> buffer(mesh.num_elements());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < ne; ++e) {
    buffer[e] = element_energy(mesh, static_cast<std::size_t>(e), u, p, eps);
  }
  double sum = 0.0;
  for (double v : buffer) {
    sum += v;
  }
  return sum;
}

void flux_residual(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> out) {
  const auto ne = static_cast<std::ptrdiff_t>(mesh.num_elements());
  std::vector<double> buffer(mesh.num_elements() * 3);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < ne; ++e) {
    element_flux(mesh, static_cast<std::size_t>(e), u, p, eps, &buffer[3 * e]);
  }
  // Adjacency lists are sorted by element, which reproduces the serial order.
  const auto offsets = mesh.adjacency_offsets();
  const auto elems = mesh.adjacency_elements();
  const auto locals = mesh.adjacency_locals();
  const auto nn = static_cast<std::ptrdiff_t>(mesh.num_nodes());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < nn; ++i) {
    double acc = 0.0;
    for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
      acc += buffer[3 * elems[k] + locals[k]];
    }
    out[i] = acc;
  }
}

void flux_jacobian(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> values) {
  const auto ne = static_cast<std::ptrdiff_t>(mesh.num_elements());
  std::vector<double> buffer(mesh.num_elements() * 9);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < ne; ++e) {
    element_jacobian(mesh, static_cast<std::size_t>(e), u, p, eps, &buffer[9 * e]);
  }
  std::fill(values.begin(), values.end(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    scatter_jacobian(mesh, e, &buffer[9 * e], values);
  }
}

}  // namespace parallel

}  // namespace conewalk::kernels
