#include "conewalk/minmax.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace conewalk;

namespace {
const double kPi = std::acos(-1.0);
const DomainSpec kLine = DomainSpec::interval(0.0, 1.0);
}  // namespace

TEST(Minmax, SignChangingThreshold) {
  EXPECT_DOUBLE_EQ(sign_changing_threshold(1), 1.0);
  EXPECT_NEAR(sign_changing_threshold(2), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sign_changing_threshold(3), (1.0 + std::sqrt(73.0)) / 6.0, 1e-15);
}

TEST(Minmax, SignClass) {
  const auto mesh = Mesh::create(kLine, 32);
  EXPECT_EQ(sign_class(FeFunction(mesh)), "zero");
  const auto s = interpolate([](Point x) { return std::sin(kPi * x.x); }, mesh);
  EXPECT_EQ(sign_class(s), "positive");
  EXPECT_EQ(sign_class(-s), "negative");
  const auto s2 = interpolate([](Point x) { return std::sin(2 * kPi * x.x); }, mesh);
  EXPECT_EQ(sign_class(s2), "sign-changing");
  EXPECT_EQ(sign_class(s * 1e-5), "zero");
}

TEST(Path, ReparametrizeEqualizesSpacing) {
  const auto mesh = Mesh::create(kLine, 32);
  const auto a = interpolate([](Point x) { return std::sin(kPi * x.x); }, mesh);
  std::vector<FeFunction> path;
  for (double s : {0.0, 0.05, 0.1, 0.7, 1.0}) {
    path.push_back(a * s);
  }
  reparametrize(path, 2.0);
  const auto len = arc_lengths(path, 2.0);
  ASSERT_EQ(len.size(), 5u);
  EXPECT_EQ(len.front(), 0.0);
  EXPECT_NEAR(len.back(), w1p_norm(a, 2.0), 1e-12);
  for (std::size_t k = 1; k < len.size(); ++k) {
    EXPECT_NEAR(len[k] - len[k - 1], len.back() / 4.0, 1e-12);
  }
}

TEST(Path, ConfigValidation) {
  MinmaxConfig cfg;
  cfg.m = 4;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.m = 41;
  cfg.newton_every = -1;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Minmax, SubcriticalSlopeFailsAtLadder) {
  const auto mesh = Mesh::create(kLine, 64);
  const double l1 = 4.0 * 64 * 64 * std::pow(std::sin(kPi / 128.0), 2.0);
  const auto spec = NonlinearitySpec::saturating(2.0, 0.5 * l1, 1.0, kLine);
  FourSolutionsConfig cfg;
  cfg.minmax.max_outer = 0;
  try {
    setup_cones(spec, mesh, cfg);
    FAIL() << "expected a stage failure";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ladder");
  }
}

TEST(Minmax, SetupBuildsOrderedCones) {
  const auto mesh = Mesh::create(kLine, 64);
  const double l2 = 4.0 * 64 * 64 * std::pow(std::sin(kPi / 64.0), 2.0);
  const auto spec = NonlinearitySpec::saturating(2.0, 1.5 * l2, 1.0, kLine);
  FourSolutionsConfig cfg;
  const auto s = setup_cones(spec, mesh, cfg);
  const auto& q = s.cones;
  for (int i : mesh->interior_nodes()) {
    EXPECT_LT(q.alpha1.vertex[i], q.beta1.vertex[i]);
    EXPECT_LT(q.beta1.vertex[i], 0.0);
    EXPECT_GT(q.alpha2.vertex[i], 0.0);
    EXPECT_LT(q.alpha2.vertex[i], q.beta2.vertex[i]);
  }
  for (const auto& b : s.certified_branch) {
    EXPECT_EQ(b, "lr_super");
  }
  EXPECT_GT(s.eps_bar, 0.0);
  EXPECT_TRUE(s.threshold_ok);
}
