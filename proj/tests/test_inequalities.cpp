#include "conewalk/inequalities.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace conewalk;

TEST(Inequalities, VectorFormsHold) {
  std::mt19937_64 rng(11);
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0}) {
    for (int N : {1, 2}) {
      for (const auto& c : check_vector_inequalities(p, N, 2000, rng)) {
        EXPECT_EQ(c.failures, 0) << c.name << " p = " << p;
        EXPECT_EQ(c.samples, 2000);
      }
    }
  }
}

TEST(Inequalities, IntegralFormsHold) {
  const auto mesh = Mesh::create(DomainSpec::interval(0.0, 1.0), 32);
  std::mt19937_64 rng(12);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto checks = check_integral_inequalities(p, mesh, 50, rng);
    EXPECT_FALSE(checks.empty());
    for (const auto& c : checks) {
      EXPECT_EQ(c.failures, 0) << c.name << " p = " << p;
    }
  }
}

TEST(Inequalities, SweepIsSeedDeterministic) {
  const auto mesh = Mesh::create(DomainSpec::interval(0.0, 1.0), 16);
  const auto a = verify_inequalities({1.5, 3.0}, 500, 10, mesh, 7);
  const auto b = verify_inequalities({1.5, 3.0}, 500, 10, mesh, 7);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  EXPECT_EQ(a.total_failures, 0);
  for (std::size_t k = 0; k < a.checks.size(); ++k) {
    EXPECT_EQ(a.checks[k].extreme, b.checks[k].extreme);
  }
}

TEST(Inequalities, PseudogradientConstantsArePositive) {
  const auto line = DomainSpec::interval(0.0, 1.0);
  const auto mesh = Mesh::create(line, 32);
  std::mt19937_64 rng(2);
  const auto spec = NonlinearitySpec::saturating(2.0, 30.0, 1.0, line).with_M(1.0);
  const auto st = pseudogradient_constants(spec, mesh, 10, 2.0, NewtonConfig{}, rng);
  EXPECT_EQ(st.samples, 10);
  EXPECT_GT(st.descent_min, 0.0);
  EXPECT_TRUE(std::isfinite(st.max_norm_K));
}
