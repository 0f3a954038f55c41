#include "conewalk/functional.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace conewalk;

namespace {
const double kPi = std::acos(-1.0);
const DomainSpec kLine = DomainSpec::interval(0.0, 1.0);

NonlinearitySpec constant_f(double p, double c, const DomainSpec& dom = kLine) {
  return NonlinearitySpec::affine_forcing(p, 0.0, [c](Point) { return -c; }, std::abs(c), dom);
}

double dot_interior(const Mesh& mesh, const std::vector<double>& r, const FeFunction& v) {
  double s = 0.0;
  for (int i : mesh.interior_nodes()) {
    s += r[i] * v[i];
  }
  return s;
}
}  // namespace

TEST(Energy, Examples) {
  const auto mesh = Mesh::create(kLine, 2048);
  const auto free2 = NonlinearitySpec::linear(2.0, 0.0, kLine);
  EXPECT_EQ(energy(FeFunction(mesh), free2), 0.0);
  const auto s = interpolate([](Point x) { return std::sin(kPi * x.x); }, mesh);
  EXPECT_NEAR(energy(s, free2), kPi * kPi / 4.0, 1e-3);
  const auto hat = interpolate([](Point x) { return 1.0 - 2.0 * std::abs(x.x - 0.5); },
                               Mesh::create(kLine, 64));
  EXPECT_NEAR(energy(hat, NonlinearitySpec::linear(3.0, 0.0, kLine)), 8.0 / 3.0, 1e-12);
}

TEST(Residual, DiscreteExactnessForConstantLoad) {
  const auto mesh = Mesh::create(kLine, 256);
  const auto u = interpolate([](Point x) { return 0.5 * x.x * (1.0 - x.x); }, mesh);
  const Residual r = residual(u, constant_f(2.0, 1.0));
  EXPECT_LT(r.dual_norm, 1e-10);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (mesh->is_boundary(i)) {
      EXPECT_EQ(r.values[i], 0.0);
    }
  }
}

TEST(Residual, DirectionalDerivative) {
  const auto mesh = Mesh::create(kLine, 128);
  std::mt19937_64 rng(21);
  const auto spec = NonlinearitySpec::saturating(2.0, 30.0, 1.0, kLine);
  for (int k = 0; k < 10; ++k) {
    auto u = random_field(mesh, rng);
    auto v = random_field(mesh, rng);
    u.clear_boundary();
    v.clear_boundary();
    const double h = 1e-6;
    const double fd = (energy(u + v * h, spec) - energy(u, spec)) / h;
    const double an = dot_interior(*mesh, residual(u, spec).values, v);
    EXPECT_NEAR(fd, an, 1e-5 * std::abs(an) + 1e-7);
  }
}

TEST(Residual, GradientCheckAcrossP) {
  const auto mesh = Mesh::create(DomainSpec::unit_square(), 10);
  std::mt19937_64 rng(4);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto spec = NonlinearitySpec::saturating(p, 10.0, 1.0, DomainSpec::unit_square());
    const double h = p == 2.0 ? 1e-5 : 1e-4;
    const double tol = p == 2.0 ? 1e-4 : 1e-3;
    for (int k = 0; k < 10; ++k) {
      auto u = random_field(mesh, rng);
      auto v = random_field(mesh, rng);
      u.clear_boundary();
      v.clear_boundary();
      // Unit W^{1,p} scale: the second-order remainder is then O(h).
      u *= 1.0 / w1p_norm(u, p);
      v *= 1.0 / w1p_norm(v, p);
      const double d = energy(u + v * h, spec) - energy(u, spec) -
                       h * dot_interior(*mesh, residual(u, spec).values, v);
      EXPECT_LT(std::abs(d) / (h * w1p_norm(v, p)), tol) << "p = " << p;
    }
  }
}

TEST(SolveMonotone, LinearConstantLoad) {
  const auto mesh = Mesh::create(kLine, 512);
  NewtonConfig cfg;
  const auto v = solve_monotone(FeFunction(mesh, 1.0), 2.0, 0.0, cfg);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = mesh->nodes()[i].x;
    EXPECT_NEAR(v[i], 0.5 * x * (1.0 - x), 1e-8);
  }
  EXPECT_NEAR(v.max(), 0.125, 1e-8);
}

TEST(SolveMonotone, ZeroLoadGivesZero) {
  const auto mesh = Mesh::create(kLine, 64);
  NewtonConfig cfg;
  for (double p : {1.5, 2.0, 3.0}) {
    EXPECT_EQ(solve_monotone(FeFunction(mesh), p, 0.5, cfg).sup_norm(), 0.0);
  }
}

TEST(SolveMonotone, CubicCaseAgainstQuadratureOracle) {
  // |v'| v' = 1/2 - x, so v(1/2) is the integral of sqrt(1/2 - x) over (0, 1/2).
  const double oracle = oracle::midpoint([](double x) { return std::sqrt(0.5 - x); }, 0.0, 0.5,
                                         200000);
  EXPECT_NEAR(oracle, (2.0 / 3.0) * std::pow(0.5, 1.5), 1e-6);
  const auto mesh = Mesh::create(kLine, 512);
  NewtonConfig cfg;
  const auto v = solve_monotone(FeFunction(mesh, 1.0), 3.0, 0.0, cfg);
  EXPECT_NEAR(v[256], oracle, 1e-3);
}

TEST(SolveMonotone, TwoDimensionalSymmetric) {
  const auto mesh = Mesh::create(DomainSpec::unit_square(), 16);
  NewtonConfig cfg;
  const auto v = solve_monotone(FeFunction(mesh, 1.0), 1.6, 1.0, cfg);
  EXPECT_GT(v.min(), -1e-14);
  // The diagonal mesh is symmetric under the swap x <-> y.
  const int n = 17;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(v[j * n + i], v[i * n + j], 1e-8);
    }
  }
}

TEST(Monotonicity, DiscreteOperatorIsMonotone) {
  const auto mesh = Mesh::create(kLine, 96);
  std::mt19937_64 rng(8);
  for (double p : {1.5, 2.0, 3.0}) {
    const FeFunction zero(mesh);
    for (int k = 0; k < 20; ++k) {
      auto u = random_field(mesh, rng);
      auto v = random_field(mesh, rng);
      u.clear_boundary();
      v.clear_boundary();
      const auto au = monotone_residual(u, zero, p, 0.3);
      const auto av = monotone_residual(v, zero, p, 0.3);
      double s = 0.0;
      for (int i : mesh->interior_nodes()) {
        s += (au[i] - av[i]) * (u[i] - v[i]);
      }
      EXPECT_GE(s, 0.0);
    }
  }
}

TEST(Newton, FindsPositiveSolution) {
  const auto mesh = Mesh::create(kLine, 128);
  const auto spec = NonlinearitySpec::saturating(2.0, 60.0, 1.0, kLine);
  const auto u0 = interpolate([](Point x) { return 3.0 * std::sin(kPi * x.x); }, mesh);
  NewtonConfig cfg;
  const auto nr = newton_solve(u0, spec, cfg, 1e-10);
  ASSERT_TRUE(nr.converged);
  EXPECT_LT(residual(nr.u, spec).dual_norm, 1e-9);
  EXPECT_GT(nr.u.min(), -1e-12);
}

TEST(Newton, IterateCallbackCanAbort) {
  const auto mesh = Mesh::create(kLine, 64);
  const auto spec = NonlinearitySpec::saturating(2.0, 60.0, 1.0, kLine);
  const auto u0 = interpolate([](Point x) { return std::sin(kPi * x.x); }, mesh);
  NewtonConfig cfg;
  const auto nr = newton_solve(u0, spec, cfg, 1e-12, 100, [](const FeFunction&) { return false; });
  EXPECT_TRUE(nr.aborted);
  EXPECT_FALSE(nr.converged);
}

TEST(NewtonConfig, Validate) {
  NewtonConfig cfg;
  cfg.eps_reg = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}
