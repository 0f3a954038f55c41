#include "conewalk/flows.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace conewalk;

namespace {
const double kPi = std::acos(-1.0);
const DomainSpec kLine = DomainSpec::interval(0.0, 1.0);

NonlinearitySpec unit_load(double p) {
  return NonlinearitySpec::affine_forcing(p, 0.0, [](Point) { return -1.0; }, 1.0, kLine);
}
}  // namespace

TEST(MonotoneIterate, ConstantLoadFromZero) {
  const auto mesh = Mesh::create(kLine, 512);
  MonotoneConfig cfg;
  const auto r = monotone_iterate(FeFunction(mesh), true, unit_load(2.0), cfg);
  double err = 0.0;
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    const double x = mesh->nodes()[i].x;
    err = std::max(err, std::abs(r.u[i] - 0.5 * x * (1.0 - x)));
  }
  EXPECT_LT(err, 1e-6);
  EXPECT_LE(r.max_violation, 0.0);
  EXPECT_LE(r.steps, 2);
}

TEST(MonotoneIterate, ExactSolutionStopsInOneStep) {
  const auto mesh = Mesh::create(kLine, 128);
  const auto exact = interpolate([](Point x) { return 0.5 * x.x * (1.0 - x.x); }, mesh);
  MonotoneConfig cfg;
  EXPECT_EQ(monotone_iterate(exact, false, unit_load(2.0), cfg).steps, 1);
}

TEST(MonotoneIterate, WrongDirectionIsFlagged) {
  const auto mesh = Mesh::create(kLine, 64);
  MonotoneConfig cfg;
  // Zero is a subsolution for a positive load; a descending run must move up.
  EXPECT_THROW(monotone_iterate(FeFunction(mesh), false, unit_load(2.0), cfg), FlowError);
}

TEST(DescentFlow, ExactSolutionIsTerminal) {
  const auto mesh = Mesh::create(kLine, 128);
  const auto exact = interpolate([](Point x) { return 0.5 * x.x * (1.0 - x.x); }, mesh);
  FlowConfig cfg;
  const auto r = descent_flow(exact, {}, cfg, unit_load(2.0));
  EXPECT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.stop, FlowStop::Critical);
}

TEST(DescentFlow, ZeroCutoffLeavesStateUnchanged) {
  const auto mesh = Mesh::create(kLine, 64);
  std::mt19937_64 rng(3);
  auto u0 = random_field(mesh, rng);
  u0.clear_boundary();
  FlowConfig cfg;
  cfg.level = 1e6;  // far outside the energy band
  cfg.band = 1.0;
  const auto r = descent_flow(u0, {}, cfg, unit_load(2.0));
  EXPECT_EQ(r.stop, FlowStop::LeftRegion);
  EXPECT_EQ(r.accepted, 0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    EXPECT_EQ(r.u[i], u0[i]);
  }
}

TEST(DescentFlow, CoerciveLinearCaseReachesZero) {
  const auto mesh = Mesh::create(kLine, 64);
  const double l1 = 4.0 * 64 * 64 * std::pow(std::sin(kPi / 128.0), 2.0);
  const auto spec = NonlinearitySpec::linear(2.0, 0.5 * l1, kLine);
  std::mt19937_64 rng(17);
  auto u0 = random_field(mesh, rng);
  u0.clear_boundary();
  FlowConfig cfg;
  cfg.pg_tol = 1e-7;
  cfg.max_steps = 2000;
  const auto r = descent_flow(u0, {}, cfg, spec);
  EXPECT_EQ(r.stop, FlowStop::Critical);
  EXPECT_LT(r.trace.back().pg_norm, 1e-6);
  EXPECT_LT(r.u.sup_norm(), 1e-5);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    EXPECT_LE(r.trace[k].J, r.trace[k - 1].J);
  }
}

TEST(DescentFlow, EnergyNonincreasingOnRandomStarts) {
  const auto mesh = Mesh::create(kLine, 48);
  std::mt19937_64 rng(29);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto spec = NonlinearitySpec::saturating(p, 60.0, 1.0, kLine);
    for (int k = 0; k < 3; ++k) {
      auto u0 = random_field(mesh, rng);
      u0.clear_boundary();
      FlowConfig cfg;
      cfg.max_steps = 40;
      const auto r = descent_flow(u0, {}, cfg, spec);
      for (std::size_t j = 1; j < r.trace.size(); ++j) {
        EXPECT_LE(r.trace[j].J, r.trace[j - 1].J) << "p = " << p;
      }
    }
  }
}

TEST(DescentFlow, GuardKeepsConeDistance) {
  const auto mesh = Mesh::create(kLine, 64);
  const auto spec = NonlinearitySpec::saturating(2.0, 60.0, 1.0, kLine);
  const auto vertex = interpolate([](Point x) { return 0.05 * std::sin(kPi * x.x); }, mesh);
  const ConeSpec cone = make_cone(ConeKind::Sub, vertex, 2.0);
  std::mt19937_64 rng(1);
  auto u0 = random_field(mesh, rng);
  u0.clear_boundary();
  FlowConfig cfg;
  cfg.max_steps = 30;
  const double r0 = cone_distance(u0, cone);
  cfg.guards.push_back({0, r0, true});
  const auto r = descent_flow(u0, {cone}, cfg, spec);
  for (const auto& row : r.trace) {
    EXPECT_LE(row.dist[0], r0);
  }
}

TEST(DescentFlow, RejectsNonzeroBoundary) {
  const auto mesh = Mesh::create(kLine, 16);
  EXPECT_THROW(descent_flow(FeFunction(mesh, 1.0), {}, FlowConfig{}, unit_load(2.0)),
               ParameterError);
}

TEST(FlowCutoff, RampProduct) {
  FlowConfig cfg;
  cfg.smoothing = 0.1;
  cfg.constraints.push_back({0, 1.0, true});
  EXPECT_DOUBLE_EQ(flow_cutoff(cfg, 0.0, {0.5}), 1.0);
  EXPECT_DOUBLE_EQ(flow_cutoff(cfg, 0.0, {0.95}), 0.5);
  EXPECT_DOUBLE_EQ(flow_cutoff(cfg, 0.0, {1.5}), 0.0);
  cfg.constraints[0].inside = false;
  EXPECT_DOUBLE_EQ(flow_cutoff(cfg, 0.0, {1.5}), 1.0);
}
