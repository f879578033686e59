#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "poismix/point_process.hpp"
#include "poismix/stats.hpp"
#include "test_support.hpp"

using namespace poismix;
using namespace poismix::testing;

namespace {

std::vector<double> sampled_counts(const IntensityMeasure& nu, const Region& region, std::size_t replicas,
                                   std::uint64_t seed) {
  std::vector<double> out(replicas);
  for (std::size_t r = 0; r < replicas; ++r) out[r] = static_cast<double>(count(sample_ppp(nu, seed, r), region));
  return out;
}

double variance(const std::vector<double>& xs) {
  const double m = estimate_mean(xs).mean;
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

}  // namespace

TEST(SamplePpp, LebesgueUnitWindowMeanCount) {
  const IntensityMeasure nu = IntensityMeasure::uniform(Box::interval(0, 1), 1.0, {8});
  const Estimate e = estimate_mean(sampled_counts(nu, [](const Location&) { return true; }, 20000, 1));
  EXPECT_LT(std::abs(e.mean - 1.0), 4 * e.std_error);
}

TEST(SamplePpp, AtomicIntensity) {
  const IntensityMeasure nu = IntensityMeasure::atomic({Atom{Location(0.25), 3.0}});
  const std::vector<double> counts = sampled_counts(nu, [](const Location&) { return true; }, 20000, 2);
  const Estimate e = estimate_mean(counts);
  EXPECT_LT(std::abs(e.mean - 3.0), 4 * e.std_error);
  for (std::size_t r = 0; r < 20; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 2, r);
    for (const Location& z : eta.points()) EXPECT_EQ(z, Location(0.25));
  }
}

TEST(SamplePpp, ZeroDensityGivesEmptyConfiguration) {
  const IntensityMeasure nu = IntensityMeasure::lebesgue(Box::interval(0, 1), [](const Location&) { return 0.0; }, {4});
  for (std::size_t r = 0; r < 100; ++r) EXPECT_TRUE(sample_ppp(nu, 3, r).empty());
}

TEST(SamplePpp, DeterministicGivenSeed) {
  const IntensityMeasure nu = unit_window(5.0);
  for (std::size_t r = 0; r < 20; ++r) {
    const PointConfiguration a = sample_ppp(nu, 9, r), b = sample_ppp(nu, 9, r);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  }
}

TEST(SamplePpp, PointsLieInWindow) {
  const IntensityMeasure nu = IntensityMeasure::uniform(Box::interval(-2.0, 3.0), 4.0, {7});
  for (std::size_t r = 0; r < 200; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 4, r);
    for (const Location& z : eta.points()) {
      EXPECT_GE(z.x(), -2.0);
      EXPECT_LE(z.x(), 3.0);
    }
  }
}

TEST(SamplePpp, CountLawMatchesPoissonPmf) {
  const IntensityMeasure nu = unit_window(3.0);
  const std::size_t replicas = 40000;
  const std::vector<double> counts = sampled_counts(nu, kA, replicas, 5);
  const double m = 1.5;
  for (std::size_t k = 0; k <= 6; ++k) {
    const double p = poisson_pmf(m, k);
    const double freq = static_cast<double>(std::count(counts.begin(), counts.end(), static_cast<double>(k))) /
                        static_cast<double>(replicas);
    EXPECT_LT(std::abs(freq - p), 4 * std::sqrt(p * (1 - p) / static_cast<double>(replicas))) << "k=" << k;
  }
  const Estimate e = estimate_mean(counts);
  EXPECT_LT(std::abs(e.mean - m), 4 * e.std_error);
  // Var of the sample variance of Poisson(m): (μ4 − σ⁴)/n with μ4 = m + 3m².
  const double var_se = std::sqrt((m + 3 * m * m - m * m) / static_cast<double>(replicas));
  EXPECT_LT(std::abs(variance(counts) - m), 4 * var_se);
}

TEST(SamplePpp, DisjointCountsUncorrelated) {
  const IntensityMeasure nu = unit_window(2.0);
  const std::size_t replicas = 20000;
  std::vector<double> prod(replicas), a(replicas), b(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 6, r);
    a[r] = static_cast<double>(count(eta, kA));
    b[r] = static_cast<double>(count(eta, kB));
  }
  const double ma = estimate_mean(a).mean, mb = estimate_mean(b).mean;
  for (std::size_t r = 0; r < replicas; ++r) prod[r] = (a[r] - ma) * (b[r] - mb);
  const Estimate cov = estimate_mean(prod);
  EXPECT_LT(std::abs(cov.mean), 4 * cov.std_error);
}

TEST(Count, Examples) {
  const IntensityMeasure nu = unit_window();
  EXPECT_EQ(count(PointConfiguration(nu), kA), 0u);
  const PointConfiguration c = config_of(nu, {0.2, 0.7});
  EXPECT_EQ(count(c, interval_region(0.0, 0.5)), 1u);
  const Region u = [](const Location& z) { return kA(z) || kB(z); };
  EXPECT_EQ(count(c, u), count(c, kA) + count(c, kB));
}

TEST(Integrate, IndicatorAndCompensated) {
  const IntensityMeasure nu = unit_window();
  const PointConfiguration c = config_of(nu, {0.1, 0.2, 0.7});
  const auto ind_a = [](const Location& z) { return in_a(z) ? 1.0 : 0.0; };
  EXPECT_DOUBLE_EQ(integrate_config(c, ind_a), 2.0);
  EXPECT_DOUBLE_EQ(nu.integrate(ind_a), 1.0);
  EXPECT_DOUBLE_EQ(compensated_integrate(c, nu, ind_a), 1.0);

  std::vector<double> comp(20000);
  for (std::size_t r = 0; r < comp.size(); ++r) comp[r] = compensated_integrate(sample_ppp(nu, 7, r), nu, ind_a);
  const Estimate e = estimate_mean(comp);
  EXPECT_LT(std::abs(e.mean), 4 * e.std_error);
}

TEST(Integrate, AtomCompensated) {
  const IntensityMeasure nu = IntensityMeasure::atomic({Atom{Location(0.5), 2.5}});
  for (std::size_t r = 0; r < 50; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 8, r);
    const double n = static_cast<double>(eta.size());
    EXPECT_DOUBLE_EQ(compensated_integrate(eta, nu, [](const Location&) { return 1.7; }), 1.7 * (n - 2.5));
  }
}

TEST(FactorialPower, Sizes) {
  const IntensityMeasure nu = unit_window();
  const PointConfiguration two = config_of(nu, {0.1, 0.6});
  EXPECT_EQ(factorial_power(two, 2).size(), 2u);
  EXPECT_TRUE(factorial_power(two, 3).empty());
  EXPECT_EQ(factorial_power(two, 1).size(), 2u);
  EXPECT_EQ(factorial_power(two, 0).size(), 1u);
  for (std::size_t n = 0; n <= 6; ++n) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(0.1 + 0.1 * static_cast<double>(i));
    const PointConfiguration c = config_of(nu, xs);
    for (std::size_t q = 0; q <= 3; ++q) {
      std::size_t expected = q > n ? 0 : 1;
      for (std::size_t i = 0; i < q && q <= n; ++i) expected *= n - i;
      EXPECT_EQ(factorial_power(c, q).size(), expected) << n << " " << q;
    }
  }
}

TEST(FactorialPower, TuplesAreDistinctIndices) {
  const IntensityMeasure nu = unit_window();
  const PointConfiguration c = config_of(nu, {0.1, 0.3, 0.8});
  for (const auto& t : factorial_power(c, 3)) {
    EXPECT_FALSE(t[0] == t[1]);
    EXPECT_FALSE(t[1] == t[2]);
    EXPECT_FALSE(t[0] == t[2]);
  }
}

TEST(Configuration, AddDrop) {
  const IntensityMeasure nu = unit_window();
  const PointConfiguration c = config_of(nu, {0.1, 0.3});
  const Location z(0.77);
  const PointConfiguration back = c.add_point(z).drop_point(z);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(back.contains(Location(0.1)));
  EXPECT_TRUE(back.contains(Location(0.3)));
  const PointConfiguration single = PointConfiguration(nu).add_point(z);
  EXPECT_EQ(single.size(), 1u);
  EXPECT_TRUE(single.drop_point(z).empty());
  EXPECT_THROW((void)c.drop_point(Location(0.5)), Error);
}
