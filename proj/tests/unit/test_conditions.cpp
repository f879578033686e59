#include <gtest/gtest.h>

#include <cmath>

#include "poismix/conditions.hpp"
#include "test_support.hpp"

using namespace poismix;
using namespace poismix::testing;

namespace {

double ind_a(const Location& z) { return in_a(z) ? 1.0 : 0.0; }

struct RemarkData {
  IntensityMeasure nu = unit_window(2.0, 16);
  PathwiseFunctional F = PathwiseFunctional::scalar([](const PointConfiguration& e) { return count(e, kA) - 1.0; });
  RandomField u = RandomField::deterministic(ind_a);
};

}  // namespace

TEST(EstimateCondition, RemarkExamples) {
  const RemarkData d;
  EXPECT_EQ(estimate_condition(ConditionTag::P3, d.F, d.u, {}, d.nu, 500, 1).value(0, 0), 0.0);
  EXPECT_NEAR(estimate_condition(ConditionTag::M_nu, d.F, d.u, {}, d.nu, 500, 1).value(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(estimate_condition(ConditionTag::R3, d.F, d.u, {}, d.nu, 500, 1).value(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(estimate_condition(ConditionTag::R4, d.F, d.u, {}, d.nu, 500, 1).value(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(estimate_condition(ConditionTag::S_nu, d.F, d.u, {}, d.nu, 500, 1).value(0, 0), 1.0, 1e-12);
}

TEST(EstimateCondition, TagNames) {
  for (const char* name : {"R3", "R4", "P3", "P4", "S_nu", "S_gamma", "W_nu", "W_gamma", "M_nu"})
    EXPECT_STREQ(to_string(parse_condition_tag(name)), name);
  EXPECT_THROW(parse_condition_tag("Q9"), Error);
  EXPECT_THROW(parse_kernel_condition_tag("KZ"), Error);
}

TEST(EstimateCondition, R4DominatesR3) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  const PathwiseFunctional F =
      PathwiseFunctional::scalar([](const PointConfiguration& e) { return std::sqrt(1.0 + count(e, kA)) + 0.3 * e.size(); });
  const RandomField u = RandomField::deterministic([](const Location& z) { return 0.5 + z.x(); });
  const double r3 = estimate_condition(ConditionTag::R3, F, u, {}, nu, 4000, 2).value(0, 0);
  const double r4 = estimate_condition(ConditionTag::R4, F, u, {}, nu, 4000, 2).value(0, 0);
  const double u_norm = std::sqrt(nu.integrate([](const Location& z) { return (0.5 + z.x()) * (0.5 + z.x()); }));
  EXPECT_LE(r3, u_norm * std::sqrt(r4));
}

TEST(EstimateCondition, VarianceIdentity) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  const RandomField u = RandomField::scalar(
      [](const PointConfiguration& e, const Location& z) { return kB(z) ? std::exp(-0.4 * count(e, kA)) : 0.5; });
  const PathwiseFunctional F = PathwiseFunctional::scalar([u, &nu](const PointConfiguration& e) { return divergence(u, e, nu)[0]; });
  ConditionAux aux;
  aux.keep_samples = true;
  const ConditionEstimate m = estimate_condition(ConditionTag::M_nu, F, u, aux, nu, 30000, 3);
  std::vector<double> f2(30000);
  for (std::size_t r = 0; r < f2.size(); ++r) {
    const double f = F(sample_ppp(nu, 3, r))[0];
    f2[r] = f * f;
  }
  const Estimate e = estimate_mean(f2);
  EXPECT_LT(std::abs(e.mean - m.value(0, 0)), 4 * std::hypot(e.std_error, m.std_error));
}

TEST(EstimateCondition, SamplesAndTargets) {
  const RemarkData d;
  ConditionAux aux;
  aux.keep_samples = true;
  aux.target = PathwiseFunctional::constant(1.0);
  const ConditionEstimate s = estimate_condition(ConditionTag::S_gamma, d.F, d.u, aux, d.nu, 2000, 4);
  EXPECT_EQ(s.samples.size(), 2000u);
  ASSERT_TRUE(s.l1_distance.has_value());
  // [1_A, 1_A]_Γ − 1 = (η(A) − 1)/2, so E| · | = E|η(A) − 1|/2.
  const double exact = 0.5 * poisson_expectation(1.0, [](double k) { return std::abs(k - 1.0); });
  EXPECT_LT(std::abs(s.l1_distance->mean - exact), 4 * s.l1_distance->std_error);
  EXPECT_GE(s.std_error, 0.0);
}

TEST(Probes, Sets) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  EXPECT_EQ(probe_fields(nu).size(), 11u);
  EXPECT_EQ(probe_functionals(nu).size(), 21u);
  const RemarkData d;
  const std::vector<ConditionEstimate> w = estimate_probes(ConditionTag::W_nu, d.F, d.u, d.nu, 200, 5);
  EXPECT_EQ(w.size(), 11u);
  // [1_A, 1_[½,1)]_ν = 0.
  bool found = false;
  for (const ConditionEstimate& e : w)
    if (e.value.norm() == 0.0) found = true;
  EXPECT_TRUE(found);
}

TEST(KernelCondition, Examples) {
  const IntensityMeasure nu = unit_window(1.0, 1024);
  const double c = 0.7, nu_a = 0.5;
  const Kernel g = Kernel::indicator({kA, kA}).scaled(c);
  const Kernel h = Kernel::indicator({kB});
  EXPECT_NEAR(kernel_condition(KernelConditionTag::KRstar, g, g, h, nu).value, c * c * std::pow(nu_a, 1.5), 1e-12);
  EXPECT_EQ(kernel_condition(KernelConditionTag::KW, g, g, h, nu).value, 0.0);
  const Kernel half = Kernel::indicator({kA, kA}).scaled(0.5);
  EXPECT_EQ(kernel_condition(KernelConditionTag::KP4, half, half, h, nu).value, 0.0);
  const KernelConditionResult ks = kernel_condition(KernelConditionTag::KS, g, g, h, nu);
  EXPECT_NEAR(ks.value, c * c * nu_a * nu_a, 1e-9);
  ASSERT_TRUE(ks.kernel.has_value());
  const std::vector<Location> xy{Location(0.1), Location(0.2)};
  EXPECT_NEAR((*ks.kernel)(xy), c * c * nu_a, 1e-12);
  EXPECT_NEAR(kernel_condition(KernelConditionTag::KR4, g, g, h, nu).value, c * std::sqrt(nu_a), 1e-9);
}

TEST(KernelCondition, StableAcrossResolutions) {
  const Kernel g{2, [](std::span<const Location> x) { return std::exp(-x[0].x() - 2 * x[1].x()) + std::exp(-2 * x[0].x() - x[1].x()); },
                 true, "g"};
  const Kernel h = Kernel::tensor({[](const Location& z) { return std::cos(z.x()); }});
  for (KernelConditionTag tag : {KernelConditionTag::KS, KernelConditionTag::KR4, KernelConditionTag::KRstar,
                                 KernelConditionTag::KW, KernelConditionTag::KP4}) {
    const double a = kernel_condition(tag, g, g, h, unit_window(1.0, 1024)).value;
    const double b = kernel_condition(tag, g, g, h, unit_window(1.0, 2048)).value;
    EXPECT_LT(std::abs(a - b), 0.01 * std::max(std::abs(a), std::abs(b))) << to_string(tag);
  }
}

TEST(KernelCondition, SymmetrizationMismatchThrows) {
  const IntensityMeasure nu = unit_window(1.0, 16);
  const Kernel g = Kernel::indicator({kA, kA});
  const Kernel ab = Kernel::indicator({kA, kB});
  EXPECT_THROW(check_symmetrization(g, ab, nu), Error);
  const Kernel ab2 = ab.scaled(2.0), ba = Kernel::indicator({kB, kA});
  EXPECT_NO_THROW(check_symmetrization(ab + ba, ab2, nu));
}
