#include "conewalk/kernels.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace conewalk;

namespace {

void compare(const DomainSpec& dom, int cells, double p, double eps) {
  const auto mesh = Mesh::create(dom, cells);
  std::mt19937_64 rng(11);
  const auto u = random_field(mesh, rng);
  EXPECT_EQ(kernels::serial::gradient_energy(*mesh, u.values(), p, eps),
            kernels::parallel::gradient_energy(*mesh, u.values(), p, eps));
  std::vector<double> rs(mesh->num_nodes()), rp(mesh->num_nodes());
  kernels::serial::flux_residual(*mesh, u.values(), p, eps, rs);
  kernels::parallel::flux_residual(*mesh, u.values(), p, eps, rp);
  EXPECT_EQ(rs, rp);
  const auto nnz = static_cast<std::size_t>(mesh->pattern().skeleton.nonZeros());
  std::vector<double> js(nnz), jp(nnz);
  kernels::serial::flux_jacobian(*mesh, u.values(), p, eps, js);
  kernels::parallel::flux_jacobian(*mesh, u.values(), p, eps, jp);
  EXPECT_EQ(js, jp);
}

}  // namespace

TEST(Kernels, ParallelMatchesSerialBitwise1D) { compare(DomainSpec::interval(0, 1), 300, 3.0, 0.0); }
TEST(Kernels, ParallelMatchesSerialBitwise2D) { compare(DomainSpec::unit_square(), 24, 1.5, 1e-3); }

TEST(Kernels, FluxIsHomogeneous) {
  const auto a = kernels::flux({3.0, 4.0}, 3.0, 0.0);
  EXPECT_DOUBLE_EQ(a[0], 15.0);
  EXPECT_DOUBLE_EQ(a[1], 20.0);
  const auto z = kernels::flux({0.0, 0.0}, 1.5, 0.0);
  EXPECT_EQ(z[0], 0.0);
}

TEST(Kernels, FluxDerivativeMatchesDifference) {
  const std::array<double, 2> g{0.7, -0.2};
  const double p = 2.6;
  const double eps = 1e-2;
  const auto J = kernels::flux_derivative(g, p, eps);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    auto gp = g;
    auto gm = g;
    gp[j] += h;
    gm[j] -= h;
    const auto fp = kernels::flux(gp, p, eps);
    const auto fm = kernels::flux(gm, p, eps);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(J[i * 2 + j], (fp[i] - fm[i]) / (2 * h), 1e-7);
    }
  }
}
