#include <gtest/gtest.h>

#include <cmath>

#include "poismix/malliavin.hpp"
#include "test_support.hpp"

using namespace poismix;
using namespace poismix::testing;

namespace {

double ind_a(const Location& z) { return in_a(z) ? 1.0 : 0.0; }

PathwiseFunctional count_a() { return PathwiseFunctional::counting(kA); }

PathwiseFunctional count_a_squared() {
  return PathwiseFunctional::scalar([](const PointConfiguration& e) {
    const double k = static_cast<double>(count(e, kA));
    return k * k;
  });
}

RandomField count_a_on_b() {
  return RandomField::scalar(
      [](const PointConfiguration& e, const Location& z) { return kB(z) ? static_cast<double>(count(e, kA)) : 0.0; },
      "eta(A)1_B");
}

}  // namespace

TEST(Divergence, Examples) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  const RandomField h = RandomField::deterministic([](const Location& z) { return 1.0 + z.x(); });
  const RandomField u = count_a_on_b();
  for (std::size_t r = 0; r < 50; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 1, r);
    const double ih = compensated_integrate(eta, nu, [](const Location& z) { return 1.0 + z.x(); });
    EXPECT_NEAR(divergence(h, eta, nu)[0], ih, 1e-12);
    const double ka = static_cast<double>(count(eta, kA)), kb = static_cast<double>(count(eta, kB));
    EXPECT_NEAR(divergence(u, eta, nu)[0], ka * (kb - 1.0), 1e-12);
    EXPECT_EQ(divergence(RandomField::zero(), eta, nu)[0], 0.0);
  }
}

TEST(Divergence, Heisenberg) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  const RandomField u = RandomField::scalar(
      [](const PointConfiguration& e, const Location& z) { return std::exp(-0.3 * count(e, kA)) * (1 + z.x()); });
  Rng rng = make_stream(2, 0, StreamTag::auxiliary);
  for (std::size_t r = 0; r < 100; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 2, r);
    const Location z = random_location(rng);
    const double lhs = divergence(u, eta.add_point(z), nu)[0] - divergence(u, eta, nu)[0];
    const double rhs = u(eta, z)[0] + divergence(add_op_field(u, z), eta, nu)[0];
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
  }
}

TEST(Divergence, ProductFormula) {
  const IntensityMeasure nu = unit_window(2.0, 16);
  const PathwiseFunctional F = count_a_squared();
  const RandomField u = RandomField::scalar(
      [](const PointConfiguration& e, const Location& z) { return static_cast<double>(count(e, kA)) * (1 + z.x()); });
  const RandomField Fu = RandomField::scalar([F, u](const PointConfiguration& e, const Location& z) { return F(e)[0] * u(e, z)[0]; });
  const RandomField DF = derivative_field(F);
  for (std::size_t r = 0; r < 100; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 3, r);
    const double lhs = divergence(Fu, eta, nu)[0];
    const double bracket = energy_bracket(RandomField::scalar([DF](const PointConfiguration& e, const Location& z) {
                                            return DF(e, z)[0];
                                          }),
                                          u, eta, nu, BracketKind::eta)
                               .matrix(0, 0);
    const double rhs = F(eta)[0] * divergence(u, eta, nu)[0] - bracket;
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST(OuGenerator, EigenvaluesAndInverse) {
  const Kernel h = Kernel::indicator({kA, kA});
  const ChaosFunctional F(std::vector<Kernel>{h});
  const std::vector<Location> xy{Location(0.1), Location(0.2)};
  const ChaosFunctional LF = ou_generator(F);
  EXPECT_EQ((*LF.term(2))(xy), -2.0);
  const ChaosFunctional Linv = pseudo_inverse(F);
  EXPECT_EQ((*Linv.term(2))(xy), -0.5);
  EXPECT_EQ((*ou_generator(Linv).term(2))(xy), 1.0);
  EXPECT_THROW(pseudo_inverse(ChaosFunctional(std::vector<Kernel>{Kernel::constant(1.0)})), Error);
}

TEST(PseudoInverse, EnergyContraction) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  ChaosFunctional F;
  F.add(Kernel::indicator({kA}).scaled(0.7));
  F.add(Kernel::indicator({kA, kB}).scaled(0.4) + Kernel::indicator({kB, kA}).scaled(0.4));
  EXPECT_LE(chaos_energy(pseudo_inverse(F), nu), chaos_energy(F, nu));
}

TEST(CanonicalField, FirstAndSecondOrder) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  ChaosFunctional F;
  F.add(Kernel::indicator({kA}));
  F.add(Kernel::indicator({kA, kA}));
  const RandomField u = canonical_field(F, nu);
  for (std::size_t r = 0; r < 20; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 4, r);
    const double k = static_cast<double>(count(eta, kA));
    // −D_z L⁻¹F = h1(z) + I1(h2(z, ·)) = 1 + (k − 1) on A.
    EXPECT_NEAR(u(eta, Location(0.2))[0], 1.0 + (k - 1.0), 1e-12);
    EXPECT_NEAR(u(eta, Location(0.8))[0], 0.0, 1e-12);
  }
}

TEST(DirichletEnergy, Examples) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const PathwiseFunctional FA = count_a(), FB = PathwiseFunctional::counting(kB);
  EXPECT_NEAR(dirichlet_energy(FA, FA, nu, 200, 1).mean, 1.0, 1e-12);
  EXPECT_NEAR(dirichlet_energy(FA, FB, nu, 200, 1).mean, 0.0, 1e-12);
  const PathwiseFunctional I2 = as_pathwise(ChaosFunctional(std::vector<Kernel>{Kernel::indicator({kA, kA})}), nu);
  const Estimate e = dirichlet_energy(I2, I2, nu, 20000, 2);
  EXPECT_LT(std::abs(e.mean - 4.0), 4 * e.std_error);
}

TEST(CarreDuChamp, Examples) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  for (std::size_t r = 0; r < 50; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 5, r);
    const double k = static_cast<double>(count(eta, kA));
    EXPECT_NEAR(carre_du_champ(count_a(), eta, nu), 0.5 * (1.0 + k), 1e-12);
    EXPECT_EQ(carre_du_champ(PathwiseFunctional::constant(2.0), eta, nu), 0.0);
    EXPECT_NEAR(carre_du_champ(count_a(), count_a(), eta, nu), 0.5 * (1.0 + k), 1e-12);
  }
}

TEST(CarreDuChamp, ExpectationMatchesEnergy) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const PathwiseFunctional F = count_a_squared();
  const std::size_t replicas = 30000;
  std::vector<double> g(replicas), energy(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 6, r);
    g[r] = carre_du_champ(F, eta, nu);
  }
  // E ∫ (D⁺F)² dν with D⁺_z F = (2k + 1) 1_A(z): ν(A) E(2k+1)².
  const double exact = poisson_expectation(1.0, [](double k) { return (2 * k + 1) * (2 * k + 1); });
  const Estimate e = estimate_mean(g);
  EXPECT_LT(std::abs(e.mean - exact), 4 * e.std_error);
}

TEST(EnergyBracket, Examples) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const RandomField one_a = RandomField::deterministic(ind_a);
  const RandomField h = RandomField::deterministic([](const Location& z) { return z.x(); });
  for (std::size_t r = 0; r < 50; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 7, r);
    const double k = static_cast<double>(count(eta, kA));
    const EnergyBracketResult b = energy_bracket(one_a, one_a, eta, nu, BracketKind::gamma);
    EXPECT_NEAR(b.matrix(0, 0), 0.5 * (1.0 + k), 1e-12);
    EXPECT_NEAR(energy_bracket(h, h, eta, nu, BracketKind::nu).matrix(0, 0),
                nu.integrate([](const Location& z) { return z.x() * z.x(); }), 1e-12);
  }
}

TEST(EnergyBracket, ExpectationsAgree) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const RandomField u = count_a_on_b();
  const std::size_t replicas = 30000;
  std::vector<double> g(replicas), n(replicas), e(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 8, r);
    g[r] = energy_bracket(u, u, eta, nu, BracketKind::gamma).matrix(0, 0);
    n[r] = energy_bracket(u, u, eta, nu, BracketKind::nu).matrix(0, 0);
    e[r] = energy_bracket(u, u, eta, nu, BracketKind::eta).matrix(0, 0);
  }
  // E η(A)² ν(B) = λ + λ².
  const Estimate en = estimate_mean(n);
  EXPECT_LT(std::abs(en.mean - 2.0), 4 * en.std_error);
  const double se = std::max(en.std_error, estimate_mean(e).std_error);
  EXPECT_LT(std::abs(estimate_mean(e).mean - 2.0), 4 * se);
  EXPECT_LT(std::abs(estimate_mean(g).mean - 2.0), 4 * se);
}

TEST(Ibp, Examples) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const PairedComparison c1 = ibp_check(count_a(), RandomField::deterministic(ind_a), nu, 30000, 9);
  EXPECT_TRUE(c1.agrees(4.0));
  EXPECT_NEAR(c1.rhs.mean, 1.0, 1e-12);
  EXPECT_LT(std::abs(c1.lhs.mean - 1.0), 4 * c1.lhs.std_error);
  const PairedComparison c2 =
      ibp_check(count_a(), RandomField::deterministic([](const Location& z) { return in_a(z) ? 0.0 : 1.0; }), nu, 30000, 10);
  EXPECT_TRUE(c2.agrees(4.0));
  EXPECT_EQ(c2.rhs.mean, 0.0);

  // F = δu with u = 1_A: E F² = E ν(u DF).
  const RandomField u = RandomField::deterministic(ind_a);
  const PathwiseFunctional F = PathwiseFunctional::scalar([u, &nu](const PointConfiguration& e) { return divergence(u, e, nu)[0]; });
  EXPECT_TRUE(ibp_check(F, u, nu, 30000, 11).agrees(4.0));
}

TEST(Skorokhod, ThreeFields) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const RandomField u_a = RandomField::deterministic(ind_a);
  const RandomField u_ab = count_a_on_b();
  const RandomField u_aa = RandomField::scalar(
      [](const PointConfiguration& e, const Location& z) { return kA(z) ? static_cast<double>(count(e, kA)) : 0.0; });
  for (const RandomField& u : {u_a, u_ab, u_aa}) EXPECT_TRUE(skorokhod_check(u, nu, 30000, 12).agrees(4.0));
}

TEST(ChainRuleMultiplication, Agrees) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const PathwiseFunctional F = PathwiseFunctional::scalar([](const PointConfiguration& e) { return std::exp(-0.5 * count(e, kA)); });
  const PathwiseFunctional G = PathwiseFunctional::scalar([](const PointConfiguration& e) { return std::cos(static_cast<double>(e.size())); });
  const RandomField u = RandomField::scalar([](const PointConfiguration& e, const Location&) { return 1.0 + count(e, kA); });
  EXPECT_TRUE(chain_rule_multiplication_check(F, G, u, nu, 30000, 13).agrees(4.0));
}

TEST(ChainRuleDifference, ExactForCubeOnCounts) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const auto phi = [](double x) { return x * x * x; };
  const auto phi2 = [](double x) { return 6 * x; };
  Rng rng = make_stream(14, 0, StreamTag::auxiliary);
  for (std::size_t r = 0; r < 100; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 14, r);
    const ChainRuleDifference d = chain_rule_difference(phi, phi2, count_a(), eta, random_location(rng));
    EXPECT_NEAR(d.lhs, d.rhs, 1e-12 * (1 + std::abs(d.lhs)));
  }
}

TEST(ChainRuleDifference, ExactForCubeAtNonUnitIncrements) {
  const IntensityMeasure nu = unit_window(2.0, 8);
  const auto phi = [](double x) { return x * x * x; };
  const auto phi2 = [](double x) { return 6 * x; };
  const PathwiseFunctional F = PathwiseFunctional::scalar([](const PointConfiguration& e) { return 2.0 * count(e, kA); });
  const PathwiseFunctional G = PathwiseFunctional::scalar([](const PointConfiguration& e) { return 0.5 * count(e, kA) - 1.0; });
  for (std::size_t r = 0; r < 50; ++r) {
    const PointConfiguration eta = sample_ppp(nu, 15, r);
    for (const PathwiseFunctional& H : {F, G}) {
      const ChainRuleDifference d = chain_rule_difference(phi, phi2, H, eta, Location(0.1));
      EXPECT_NEAR(d.lhs, d.rhs, 1e-12 * (1 + std::abs(d.lhs)));
    }
  }
}

TEST(ChainRuleRemainder, ClosedForms) {
  // φ'' ≡ c gives ∫∫ α c = c/2; φ'' = identity gives x/2 + 1/3 + (h − 1)/6.
  EXPECT_NEAR(chain_rule_remainder([](double) { return 3.0; }, 0.7, 5.0), 1.5, 1e-14);
  for (double h : {-2.0, 0.0, 1.0, 3.5})
    EXPECT_NEAR(chain_rule_remainder([](double x) { return x; }, 0.4, h), 0.2 + 1.0 / 3.0 + (h - 1.0) / 6.0, 1e-14);
}
