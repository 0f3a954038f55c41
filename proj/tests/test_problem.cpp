#include "conewalk/problem.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace conewalk;

namespace {
const DomainSpec kLine = DomainSpec::interval(0.0, 1.0);
const DomainSpec kSquare = DomainSpec::unit_square();

NonlinearitySpec scalar(double p, std::function<double(double)> f, std::function<double(double)> F,
                        double q, const DomainSpec& dom = kLine) {
  return NonlinearitySpec::custom(
      p, [f](Point, double t) { return f(t); }, [F](Point, double t) { return F(t); }, {}, q, 1.0,
      1.0, dom);
}
}  // namespace

TEST(Problem, PhiP) {
  EXPECT_EQ(phi_p(0.0, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(phi_p(-2.0, 3.0), -4.0);
  EXPECT_DOUBLE_EQ(phi_p(4.0, 1.5), 2.0);
}

TEST(Problem, SobolevExponent) {
  EXPECT_TRUE(std::isinf(sobolev_exponent(2.0, 2)));
  EXPECT_TRUE(std::isinf(sobolev_exponent(1.5, 1)));
  EXPECT_DOUBLE_EQ(sobolev_exponent(1.5, 2), 6.0);
}

TEST(Problem, HEvalExamples) {
  auto zero = scalar(2.0, [](double) { return 0.0; }, [](double) { return 0.0; }, 1.5);
  EXPECT_DOUBLE_EQ(h_eval(zero.with_M(1.0), {0.5, 0.0}, -3.0), -3.0);
  for (double p : {1.5, 2.0, 3.0}) {
    auto id = scalar(p, [](double t) { return t; }, [](double t) { return 0.5 * t * t; }, 1.5);
    EXPECT_DOUBLE_EQ(h_eval(id, {0.5, 0.0}, 2.0), 2.0);
  }
  const auto sat = NonlinearitySpec::saturating(2.0, 2.0, 1.0, kLine);
  EXPECT_DOUBLE_EQ(h_eval(sat, {0.3, 0.0}, 1.0), 1.0);
}

TEST(Problem, SaturatingVerifiedAndBounded) {
  for (double p : {1.7, 2.0, 3.0}) {
    const auto spec = NonlinearitySpec::saturating(p, 40.0, 1.0, kLine);
    const auto rep = check_hypotheses(spec, 1000, 5);
    EXPECT_TRUE(rep.all_verified()) << "p = " << p;
    for (double t = -50.0; t <= 50.0; t += 0.37) {
      const double f = spec.f_of({0.5, 0.0}, t);
      EXPECT_LE(std::abs(f), 40.0 + 1e-12);
      EXPECT_GE(f * t, 0.0);
    }
  }
}

TEST(Problem, PrimitiveMatchesIntegral) {
  const auto spec = NonlinearitySpec::saturating(2.5, 3.0, 0.7, kSquare);
  const Point x{0.2, 0.4};
  for (double t : {-3.0, -0.4, 0.0, 0.9, 5.0}) {
    const int n = 20000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += spec.f_of(x, (i + 0.5) * t / n) * t / n;
    }
    EXPECT_NEAR(spec.F_of(x, t), s, 1e-6 * (1.0 + std::abs(s)));
  }
}

TEST(Problem, DecreasingFViolatesMonotonicity) {
  const auto spec =
      scalar(2.0, [](double t) { return -t; }, [](double t) { return -0.5 * t * t; }, 1.5);
  const auto rep = check_hypotheses(spec, 500);
  const auto& e = rep.get("f3");
  ASSERT_EQ(e.status, HypothesisStatus::Violated);
  EXPECT_LT(h_eval(spec, e.x, e.t2), h_eval(spec, e.x, e.t));
}

TEST(Problem, CubicGrowthAtCriticalDimension) {
  const auto spec = scalar(
      2.0, [](double t) { return t * t * t; }, [](double t) { return 0.25 * t * t * t * t; }, 4.0,
      kSquare);
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(check_hypotheses(spec, 500).get("f1").status, HypothesisStatus::VerifiedOnSamples);
}

TEST(Problem, ValidateRejectsSupercriticalQ) {
  const auto spec = scalar(1.5, [](double t) { return t; }, [](double t) { return 0.5 * t * t; },
                           7.0, kSquare);
  EXPECT_THROW(spec.validate(), ParameterError);
}

TEST(Problem, EstimateM) {
  // f = -t needs M >= 1 at p = 2.
  const auto spec =
      scalar(2.0, [](double t) { return -t; }, [](double t) { return -0.5 * t * t; }, 1.5);
  EXPECT_NEAR(estimate_M(spec, 3.0), 1.0, 1e-3);
  EXPECT_EQ(estimate_M(NonlinearitySpec::saturating(2.0, 5.0, 1.0, kLine), 3.0), 0.0);
}
