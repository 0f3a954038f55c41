#include "conewalk/koperator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace conewalk;

namespace {
const DomainSpec kLine = DomainSpec::interval(0.0, 1.0);
}

TEST(KOperator, ConstantLoadClosedForm) {
  const auto mesh = Mesh::create(kLine, 512);
  const auto spec =
      NonlinearitySpec::affine_forcing(2.0, 0.0, [](Point) { return -1.0; }, 1.0, kLine);
  const KResult k = k_apply(FeFunction(mesh), spec, NewtonConfig{});
  EXPECT_NEAR(k.v.max(), 0.125, 1e-8);
  EXPECT_NEAR(k.pg_norm, 1.0 / std::sqrt(12.0), 1e-4);
  EXPECT_FALSE(k.fixed_point);
}

TEST(KOperator, ZeroIsFixedWhenFVanishes) {
  const auto mesh = Mesh::create(kLine, 64);
  const auto spec = NonlinearitySpec::saturating(2.0, 5.0, 1.0, kLine).with_M(1.0);
  const KResult k = k_apply(FeFunction(mesh), spec, NewtonConfig{});
  EXPECT_EQ(k.pg_norm, 0.0);
  EXPECT_TRUE(k.fixed_point);
}

TEST(KOperator, SolutionIsFixedPoint) {
  const auto mesh = Mesh::create(kLine, 128);
  const auto spec = NonlinearitySpec::saturating(3.0, 400.0, 1.0, kLine);
  const auto u0 = interpolate([](Point x) { return 2.0 * std::sin(std::acos(-1.0) * x.x); }, mesh);
  NewtonConfig cfg;
  const auto nr = newton_solve(u0, spec, cfg, 1e-12);
  ASSERT_TRUE(nr.converged);
  const KResult k = k_apply(nr.u, spec, cfg);
  EXPECT_LE(k.pg_norm, fixed_point_tolerance(nr.u, 3.0));
}

TEST(KOperator, InnerProductIsNonnegative) {
  const auto mesh = Mesh::create(kLine, 96);
  std::mt19937_64 rng(13);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto spec = NonlinearitySpec::saturating(p, 50.0, 1.0, kLine);
    for (int k = 0; k < 15; ++k) {
      auto u = random_field(mesh, rng);
      u.clear_boundary();
      const KResult r = k_apply(u, spec, NewtonConfig{});
      EXPECT_GE(r.inner, -1e-12) << "p = " << p;
    }
  }
}

TEST(KOperator, LoadAddsMonotoneShift) {
  const auto mesh = Mesh::create(kLine, 8);
  const auto spec = NonlinearitySpec::saturating(2.0, 2.0, 1.0, kLine).with_M(3.0);
  const auto load = k_load(FeFunction(mesh, 1.0), spec);
  EXPECT_DOUBLE_EQ(load[3], 1.0 + 3.0);
}
