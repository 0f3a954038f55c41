#include "conewalk/cones.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace conewalk;

namespace {

std::vector<double> table(const DomainSpec& dom, double sigma) {
  std::vector<double> v;
  for (int K : certificate_levels()) {
    v.push_back(graded_integral(dom, [sigma](const SamplePoint& x) { return std::pow(x.dist, -sigma); },
                                K));
  }
  return v;
}

ConeSpec hopf_cone(const MeshPtr& mesh, double power) {
  ConeSpec c = make_cone(ConeKind::Sub, FeFunction(mesh), 1.5, "hopf");
  c.strict = true;
  c.remainder_fn = [power](const SamplePoint& x) { return std::pow(x.dist, power); };
  return c;
}

}  // namespace

TEST(Certificates, GradedIntegralOfPolynomial) {
  const auto line = DomainSpec::interval(0.0, 1.0);
  const double v = graded_integral(line, [](const SamplePoint& x) { return x.position().x; }, 64);
  EXPECT_NEAR(v, 0.5, 1e-12);
  const double s = graded_integral(DomainSpec::unit_square(),
                                   [](const SamplePoint& x) { return x.position().x * x.position().y; },
                                   64);
  EXPECT_NEAR(s, 0.25, 1e-10);
}

TEST(Certificates, BlowUpClassification) {
  const auto line = DomainSpec::interval(0.0, 1.0);
  for (double sigma : {0.5, 0.9, 1.1, 2.0}) {
    const auto st = classify_levels(table(line, sigma));
    if (sigma < 1.0) {
      EXPECT_EQ(st, CertificateStatus::Satisfied) << sigma;
      // Both ends: 2 * (1/2)^(1-sigma) / (1-sigma).
      const double exact = 2.0 * std::pow(0.5, 1.0 - sigma) / (1.0 - sigma);
      EXPECT_NEAR(table(line, sigma).back(), exact, 0.01 * exact);
    } else {
      EXPECT_EQ(st, CertificateStatus::Violated) << sigma;
    }
  }
}

TEST(Certificates, ClassifyLevelsRules) {
  double g = 0.0;
  EXPECT_EQ(classify_levels({1.0, 1.01, 1.02}), CertificateStatus::Satisfied);
  EXPECT_EQ(classify_levels({1.0, std::numeric_limits<double>::infinity(), 2.0}),
            CertificateStatus::Violated);
  EXPECT_EQ(classify_levels({1.0, 2.0, 4.0}, &g), CertificateStatus::Violated);
  EXPECT_DOUBLE_EQ(g, 2.0);
  EXPECT_EQ(classify_levels({1.0, 2.0, 2.5}), CertificateStatus::Inconclusive);
}

TEST(Certificates, ExponentHelpers) {
  EXPECT_DOUBLE_EQ(l1_sub_exponent(1.5, 2), 1.5);
  EXPECT_DOUBLE_EQ(l1_sub_exponent(1.5, 1), 1.0);
  EXPECT_DOUBLE_EQ(lr_super_exponent(3.0, 1), 1.0);
  EXPECT_DOUBLE_EQ(lr_super_exponent(3.0, 3), 2.0);
  EXPECT_DOUBLE_EQ(lr_super_exponent(3.0, 4), 4.0 / 3.0);
  EXPECT_EQ(parse_branch(to_string(Branch::SupSuper)), Branch::SupSuper);
  EXPECT_THROW(parse_branch("nope"), ParameterError);
}

TEST(Certificates, HopfRemainderOnSquare) {
  const auto sq = DomainSpec::unit_square();
  const auto mesh = Mesh::create(sq, 8);
  const auto spec = NonlinearitySpec::saturating(1.5, 20.0, 1.0, sq);
  const auto ok = check_invariance_certificate(hopf_cone(mesh, 0.5), spec, Branch::L1Sub);
  EXPECT_DOUBLE_EQ(ok.exponent, 1.5);
  EXPECT_EQ(ok.status, CertificateStatus::Satisfied);
  const auto bad = check_invariance_certificate(hopf_cone(mesh, 3.0), spec, Branch::L1Sub);
  EXPECT_EQ(bad.status, CertificateStatus::Violated);
  EXPECT_THROW(check_invariance_certificate(hopf_cone(mesh, 0.5), spec, Branch::LrSuper),
               ParameterError);
}

TEST(Certificates, LinearCaseNeedsNoIntegrability) {
  const auto line = DomainSpec::interval(0.0, 1.0);
  const auto mesh = Mesh::create(line, 8);
  const auto spec = NonlinearitySpec::saturating(2.0, 20.0, 1.0, line);
  ConeSpec c = hopf_cone(mesh, 10.0);
  c.p = 2.0;
  const auto cert = check_invariance_certificate(c, spec, Branch::LrSuper);
  EXPECT_EQ(cert.status, CertificateStatus::Satisfied);
  EXPECT_TRUE(cert.values.empty());
  c.strict = false;
  EXPECT_THROW(check_invariance_certificate(c, spec, Branch::LrSuper), ParameterError);
}
