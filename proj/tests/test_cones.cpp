#include "conewalk/cones.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace conewalk;

namespace {
const double kPi = std::acos(-1.0);
const DomainSpec kLine = DomainSpec::interval(0.0, 1.0);
}  // namespace

TEST(Cones, DistanceAndProjection) {
  const auto mesh = Mesh::create(kLine, 64);
  const auto vertex = interpolate([](Point x) { return -x.x * (1.0 - x.x); }, mesh);
  const auto sub = make_cone(ConeKind::Sub, vertex, 2.0, "a");
  const auto super = make_cone(ConeKind::Super, -vertex, 2.0, "b");
  EXPECT_EQ(cone_distance(vertex, sub), 0.0);
  EXPECT_EQ(cone_distance(FeFunction(mesh), sub), 0.0);
  EXPECT_NEAR(cone_distance(vertex * 2.0, sub), w1p_norm(vertex, 2.0), 1e-14);
  EXPECT_NEAR(cone_distance(-vertex * 2.0, super), w1p_norm(vertex, 2.0), 1e-14);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    auto u = random_field(mesh, rng);
    u.clear_boundary();
    const auto w = project_plus(u, sub);
    EXPECT_EQ(cone_distance(w, sub), 0.0);
    EXPECT_TRUE(w.dirichlet_zero());
  }
}

TEST(Cones, ExactProjectionP2) {
  const auto mesh = Mesh::create(kLine, 32);
  const auto vertex = interpolate([](Point x) { return -x.x * (1.0 - x.x); }, mesh);
  const auto sub = make_cone(ConeKind::Sub, vertex, 2.0);
  std::mt19937_64 rng(9);
  auto u = random_field(mesh, rng);
  u.clear_boundary();
  u = u * 0.5 + vertex;
  const auto [proj, dist] = exact_projection_p2(u, sub);
  EXPECT_LE(cone_distance(proj, sub), 1e-10);
  EXPECT_NEAR(dist, w1p_norm(proj - u, 2.0), 1e-10);
  // The exact projection is never farther than the nodal one.
  EXPECT_LE(dist, w1p_norm(project_plus(u, sub) - u, 2.0) + 1e-12);
  EXPECT_THROW(exact_projection_p2(u, make_cone(ConeKind::Sub, vertex, 3.0)), ParameterError);
}

TEST(Cones, Alpha1MatchesLinearOracle) {
  const int n = 128;
  const auto mesh = Mesh::create(kLine, n);
  const auto spec = NonlinearitySpec::saturating(2.0, 5.0, 1.0, kLine);
  const double l1 = 4.0 * n * n * std::pow(std::sin(kPi / (2.0 * n)), 2.0);
  const double mu = 0.5 * l1;
  const auto cone = build_alpha1(spec, FeFunction(mesh, 1.0), l1, mu, 0.0, NewtonConfig{});
  const auto w = oracle::dense_linear(0.75 * l1, [](double) { return -1.0; }, n);
  for (int i = 0; i <= n; ++i) {
    EXPECT_NEAR(cone.vertex[i], w[i], 1e-8);
  }
  EXPECT_TRUE(cone.strict);
  EXPECT_LT(cone.vertex.max(), 1e-14);
  EXPECT_GT(cone.remainder.min(), 0.0);
}

TEST(Cones, Beta2MirrorsAlpha1ForOddF) {
  const auto mesh = Mesh::create(kLine, 64);
  const auto spec = NonlinearitySpec::saturating(3.0, 40.0, 1.0, kLine);
  const double l1 = lambda1(3.0, mesh).lambda1;
  const double mu = 0.5 * l1;
  const auto g = forcing_bound(spec, mesh, mu, -1);
  NewtonConfig cfg;
  const auto a = build_alpha1(spec, g, l1, mu, 0.1, cfg);
  const auto b = build_beta2(spec, forcing_bound(spec, mesh, mu, 1), l1, mu, 0.1, cfg);
  for (std::size_t i = 0; i < a.vertex.size(); ++i) {
    EXPECT_NEAR(a.vertex[i], -b.vertex[i], 1e-8 * (1.0 + b.vertex.sup_norm()));
  }
  EXPECT_NEAR(b.vertex[0], 0.1, 1e-14);
  EXPECT_THROW(build_alpha1(spec, g, l1, 2.0 * l1, 0.0, cfg), ParameterError);
}

TEST(Cones, LadderAndDisjointness) {
  const auto mesh = Mesh::create(kLine, 64);
  MinmaxConfig mcfg;
  mcfg.max_outer = 0;
  const auto eig = eigen_solve(2.0, mesh, mcfg);
  const auto spec = NonlinearitySpec::saturating(2.0, 3.0 * eig.lambda1, 1.0, kLine);
  const auto lp = ladder_params(spec, eig);
  EXPECT_GT(lp.t_bar, 0.0);
  EXPECT_NEAR(lp.l_bar, lp.t_bar / eig.phi1.sup_norm(), 1e-15);
  const auto [alpha2, beta1] = build_ladder(spec, eig, 0.25 * lp.l_bar, lp);
  EXPECT_TRUE(alpha2.strict);
  EXPECT_TRUE(beta1.strict);
  EXPECT_GT(alpha2.vertex.max(), 0.0);
  EXPECT_THROW(build_ladder(spec, eig, 2.0 * lp.l_bar, lp), ParameterError);

  const auto rep = cones_disjoint_report(alpha2, beta1, 0.0);
  EXPECT_GT(rep.measure_fraction, 0.9);
  EXPECT_GT(rep.eps_bar, 0.0);
  EXPECT_TRUE(cones_disjoint(alpha2, beta1, 0.5 * rep.eps_bar));
  EXPECT_FALSE(cones_disjoint(alpha2, beta1, 2.0 * rep.eps_bar));
  // Swapped roles: the sub vertex lies below the super vertex, nothing separates.
  EXPECT_FALSE(cones_disjoint(make_cone(ConeKind::Sub, beta1.vertex, 2.0),
                              make_cone(ConeKind::Super, alpha2.vertex, 2.0), 0.0));
}

TEST(Cones, LadderRejectsSlopeBelowLambda1) {
  const auto mesh = Mesh::create(kLine, 64);
  MinmaxConfig mcfg;
  mcfg.max_outer = 0;
  const auto eig = eigen_solve(2.0, mesh, mcfg);
  const auto spec = NonlinearitySpec::saturating(2.0, 0.5 * eig.lambda1, 1.0, kLine);
  EXPECT_THROW(ladder_params(spec, eig), ParameterError);
}

TEST(Cones, ForcingBoundDominates) {
  const auto mesh = Mesh::create(kLine, 16);
  const auto spec = NonlinearitySpec::saturating(2.0, 30.0, 1.0, kLine);
  const double mu = 4.0;
  const auto g = forcing_bound(spec, mesh, mu, -1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_GE(g[i], 0.0);
    for (double t : {-0.01, -1.0, -10.0, -1000.0}) {
      EXPECT_GE(spec.f(mesh->nodes()[i], t), mu * t - g[i] - 1e-12);
    }
  }
}

TEST(Cones, MetricDistance) {
  const auto mesh = Mesh::create(kLine, 32);
  const auto vertex = interpolate([](Point x) { return -x.x * (1.0 - x.x); }, mesh);
  std::mt19937_64 rng(10);
  for (auto kind : {ConeKind::Sub, ConeKind::Super}) {
    const auto cone = make_cone(kind, kind == ConeKind::Sub ? vertex : -vertex, 2.0);
    auto u = random_field(mesh, rng);
    u.clear_boundary();
    u = u * 0.3 + cone.vertex;
    const double exact = exact_projection_p2(u, cone).second;
    EXPECT_NEAR(metric_distance(u, cone), exact, 1e-8 * (1.0 + exact));
    EXPECT_EQ(metric_distance(project_plus(u, cone), cone), 0.0);
  }
  for (double p : {1.5, 3.0}) {
    const auto cone = make_cone(ConeKind::Sub, vertex, p);
    auto u = random_field(mesh, rng);
    u.clear_boundary();
    u = u * 0.3 + vertex;
    const double d = metric_distance(u, cone);
    EXPECT_LE(d, cone_distance(u, cone) + 1e-15);
    EXPECT_GT(d, 0.0);
  }
}
