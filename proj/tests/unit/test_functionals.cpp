#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "poismix/functionals.hpp"
#include "test_support.hpp"

using namespace poismix;
using namespace poismix::testing;

namespace {

// Nested-difference oracle: D_{z1}(D_{z2..zq} F).
double nested_difference(const PathwiseFunctional& F, const PointConfiguration& c, std::span<const Location> zs) {
  if (zs.empty()) return F(c)[0];
  return nested_difference(F, c.add_point(zs[0]), zs.subspan(1)) - nested_difference(F, c, zs.subspan(1));
}

// Random functional of the counts in A and B.
PathwiseFunctional random_functional(Rng& rng) {
  const double a = uniform01(rng) * 2 - 1, b = uniform01(rng) * 2 - 1, c = uniform01(rng) * 2, d = uniform01(rng);
  const int p = 1 + static_cast<int>(uniform01(rng) * 3);
  return PathwiseFunctional::scalar([=](const PointConfiguration& eta) {
    const double na = static_cast<double>(count(eta, kA)), nb = static_cast<double>(count(eta, kB));
    return a * std::pow(na, p) + b * std::exp(-c * nb) + d * na * nb;
  });
}

PointConfiguration random_config(const IntensityMeasure& nu, Rng& rng) {
  std::vector<double> xs(static_cast<std::size_t>(uniform01(rng) * 6));
  for (double& x : xs) x = uniform01(rng);
  return config_of(nu, xs);
}

}  // namespace

TEST(AddOp, Examples) {
  const IntensityMeasure nu = unit_window();
  const PathwiseFunctional F = PathwiseFunctional::counting(kA);
  const PointConfiguration c = config_of(nu, {0.1, 0.2, 0.9});
  EXPECT_EQ(add_op(F, c, Location(0.3))[0], 1.0);
  EXPECT_EQ(add_op(F, c, Location(0.6))[0], 0.0);
  EXPECT_EQ(add_op(PathwiseFunctional::constant(4.0), c, Location(0.3))[0], 0.0);
  const PathwiseFunctional F2 = PathwiseFunctional::scalar([](const PointConfiguration& e) {
    const double k = static_cast<double>(count(e, kA));
    return k * k;
  });
  EXPECT_EQ(add_op(F2, c, Location(0.4))[0], 2 * 2 + 1);
}

TEST(DropOp, Examples) {
  const IntensityMeasure nu = unit_window();
  const PathwiseFunctional F = PathwiseFunctional::counting(kA);
  const PointConfiguration c = config_of(nu, {0.1, 0.2, 0.9});
  EXPECT_EQ(drop_op(F, c, Location(0.3))[0], 0.0);
  EXPECT_EQ(drop_op(F, c, Location(0.1))[0], 1.0);
  Rng rng = make_stream(1, 0, StreamTag::auxiliary);
  for (int i = 0; i < 200; ++i) {
    const PathwiseFunctional G = random_functional(rng);
    const PointConfiguration eta = random_config(nu, rng);
    const Location z = random_location(rng);
    EXPECT_EQ(drop_op(G, eta.add_point(z), z)[0], add_op(G, eta, z)[0]);
  }
}

TEST(IteratedAddOp, Examples) {
  const IntensityMeasure nu = unit_window();
  const PointConfiguration c = config_of(nu, {0.1, 0.7});
  const PathwiseFunctional F = PathwiseFunctional::counting(kA);
  const PathwiseFunctional F2 = PathwiseFunctional::scalar([](const PointConfiguration& e) {
    const double k = static_cast<double>(count(e, kA));
    return k * k;
  });
  const std::vector<Location> aa{Location(0.2), Location(0.3)}, ab{Location(0.2), Location(0.8)};
  EXPECT_EQ(iterated_add_op(F2, c, aa)[0], 2.0);
  EXPECT_EQ(iterated_add_op(F2, c, ab)[0], 0.0);
  EXPECT_EQ(iterated_add_op(F, c, aa)[0], 0.0);
  const std::vector<Location> one{Location(0.3)};
  EXPECT_EQ(iterated_add_op(F2, c, one)[0], add_op(F2, c, one[0])[0]);
}

TEST(IteratedAddOp, MatchesNestedOracleAndIsSymmetric) {
  const IntensityMeasure nu = unit_window();
  Rng rng = make_stream(2, 0, StreamTag::auxiliary);
  for (int trial = 0; trial < 300; ++trial) {
    const PathwiseFunctional F = random_functional(rng);
    const PointConfiguration eta = random_config(nu, rng);
    const std::size_t q = 1 + static_cast<std::size_t>(uniform01(rng) * 3);
    std::vector<Location> zs(q);
    for (Location& z : zs) z = random_location(rng);
    const double fast = iterated_add_op(F, eta, zs)[0];
    EXPECT_NEAR(fast, nested_difference(F, eta, zs), 1e-9 * (1 + std::abs(fast)));
    std::vector<Location> perm = zs;
    std::reverse(perm.begin(), perm.end());
    EXPECT_EQ(iterated_add_op(F, eta, perm)[0], fast);
  }
}

TEST(ChainRule, SquarePathwise) {
  const IntensityMeasure nu = unit_window();
  Rng rng = make_stream(3, 0, StreamTag::auxiliary);
  for (int trial = 0; trial < 300; ++trial) {
    const PathwiseFunctional F = random_functional(rng);
    const PathwiseFunctional F2 = PathwiseFunctional::scalar([F](const PointConfiguration& e) {
      const double f = F(e)[0];
      return f * f;
    });
    PointConfiguration eta = random_config(nu, rng);
    const Location z = random_location(rng);
    const double f = F(eta)[0], dp = add_op(F, eta, z)[0];
    EXPECT_NEAR(add_op(F2, eta, z)[0], 2 * f * dp + dp * dp, 1e-9 * (1 + f * f + dp * dp));
    eta = eta.add_point(z);
    const double g = F(eta)[0], dm = drop_op(F, eta, z)[0];
    EXPECT_NEAR(drop_op(F2, eta, z)[0], 2 * g * dm - dm * dm, 1e-9 * (1 + g * g + dm * dm));
  }
}

TEST(Mecke, ThreeExamples) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  const std::size_t replicas = 30000;
  const double lambda = 1.0;

  const PairedComparison c1 = mecke_check([](const PointConfiguration&, const Location& z) { return kB(z) ? 1.0 : 0.0; },
                                          nu, replicas, 11);
  EXPECT_TRUE(c1.agrees(4.0));
  EXPECT_LT(std::abs(c1.lhs.mean - 1.0), 4 * c1.lhs.std_error);

  const PairedComparison c2 = mecke_check(
      [](const PointConfiguration& e, const Location& z) { return kB(z) ? static_cast<double>(count(e, kA)) : 0.0; }, nu,
      replicas, 12);
  EXPECT_TRUE(c2.agrees(4.0));
  EXPECT_LT(std::abs(c2.rhs.mean - lambda * lambda), 4 * c2.rhs.std_error);

  const PairedComparison c3 = mecke_check(
      [](const PointConfiguration& e, const Location& z) { return kA(z) ? static_cast<double>(count(e, kA)) : 0.0; }, nu,
      replicas, 13);
  EXPECT_TRUE(c3.agrees(4.0));
  const double exact = poisson_expectation(lambda, [](double k) { return k * k; });
  EXPECT_NEAR(exact, lambda * (lambda + 1), 1e-12);
  EXPECT_LT(std::abs(c3.lhs.mean - exact), 4 * c3.lhs.std_error);
}

TEST(AddOpField, DifferencesSecondArgument) {
  const IntensityMeasure nu = unit_window();
  const RandomField u = RandomField::scalar(
      [](const PointConfiguration& e, const Location& x) { return kB(x) ? static_cast<double>(count(e, kA)) : 0.0; });
  const RandomField du = add_op_field(u, Location(0.2));
  const PointConfiguration c = config_of(nu, {0.1});
  EXPECT_EQ(du(c, Location(0.7))[0], 1.0);
  EXPECT_EQ(du(c, Location(0.3))[0], 0.0);
  const RandomField dF = derivative_field(PathwiseFunctional::counting(kA));
  EXPECT_EQ(dF(c, Location(0.3))[0], 1.0);
  EXPECT_EQ(dF(c, Location(0.8))[0], 0.0);
}
