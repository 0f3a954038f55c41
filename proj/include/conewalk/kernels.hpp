#pragma once

#include "conewalk/grid.hpp"

#include <span>

// Element loops of the p-Laplacian. Both namespaces expose identical
// signatures; the parallel variants compute per-element contributions
// concurrently and then reduce per node in increasing element order, so
// their output is bit-identical to the serial reference.
namespace conewalk::kernels {

/// Regularized flux a_eps(g) = (|g|^2 + eps^2)^((p-2)/2) g, with a(0) = 0.
std::array<double, 2> flux(std::array<double, 2> g, double p, double eps);

/// Local 2x2 Jacobian of the regularized flux (row-major).
std::array<double, 4> flux_derivative(std::array<double, 2> g, double p, double eps);

namespace serial {

/// sum_e vol_e ((|grad u|^2 + eps^2)^(p/2) - eps^p) / p; eps = 0 gives |grad u|^p / p.
double gradient_energy(const Mesh& mesh, std::span<const double> u, double p, double eps = 0.0);

/// out[i] = sum_e vol_e a_eps(grad u) . grad phi_i for every node i
/// (boundary rows included; callers drop them).
void flux_residual(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> out);

/// Writes the interior-interior Jacobian of flux_residual into `values`,
/// laid out as the mesh sparsity pattern's value array.
void flux_jacobian(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> values);

}  // namespace serial

namespace parallel {

double gradient_energy(const Mesh& mesh, std::span<const double> u, double p, double eps = 0.0);
void flux_residual(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> out);
void flux_jacobian(const Mesh& mesh, std::span<const double> u, double p, double eps,
                   std::span<double> values);

}  // namespace parallel

}  // namespace conewalk::kernels
