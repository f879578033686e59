#include "poismix/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <numbers>
#include <random>

#include "poismix/chaos.hpp"
#include "poismix/conditions.hpp"
#include "poismix/functionals.hpp"
#include "poismix/malliavin.hpp"
#include "poismix/mixtures.hpp"
#include "poismix/parallel.hpp"
#include "poismix/quadratic.hpp"

namespace poismix {

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

double indicator(const Region& r, const Location& z) { return r(z) ? 1.0 : 0.0; }

// ν = 2·Lebesgue on [0, 1): A = [0, ½) and B = [½, 1) both have mass 1.
struct Setup {
  IntensityMeasure nu;
  Region A = interval_region(0.0, 0.5);
  Region B = interval_region(0.5, 1.0);
  Region W = interval_region(0.0, 1.0);

  explicit Setup(std::size_t resolution)
      : nu(IntensityMeasure::uniform(Box::interval(0.0, 1.0), 2.0, {resolution})) {}
};

Location random_location(std::uint64_t seed, std::size_t i) {
  Rng rng = make_stream(seed, i, StreamTag::auxiliary);
  return Location(uniform01(rng));
}

InvariantResult exact_result(std::string group, std::string name, double worst, const VerifyOptions& o) {
  InvariantResult r;
  r.group = std::move(group);
  r.name = std::move(name);
  r.exact = true;
  r.statistic = worst;
  r.threshold = o.exact_tolerance;
  r.passed = worst <= o.exact_tolerance;
  r.detail = fmt::format("max relative error {:.3e}", worst);
  return r;
}

InvariantResult paired_result(std::string group, std::string name, const PairedComparison& c, const VerifyOptions& o) {
  InvariantResult r;
  r.group = std::move(group);
  r.name = std::move(name);
  r.statistic = std::abs(c.z());
  r.threshold = o.z_max;
  r.passed = c.agrees(o.z_max);
  r.detail = fmt::format("lhs {:.6g} rhs {:.6g} diff {:.3e} se {:.3e}", c.lhs.mean, c.rhs.mean, c.difference,
                         c.std_error);
  return r;
}

InvariantResult exact_value_result(std::string group, std::string name, const ExactComparison& c,
                                   const VerifyOptions& o) {
  InvariantResult r;
  r.group = std::move(group);
  r.name = std::move(name);
  r.statistic = std::abs(c.z());
  r.threshold = o.z_max;
  r.passed = c.agrees(o.z_max);
  r.detail = fmt::format("estimate {:.6g} exact {:.6g} se {:.3e}", c.estimate.mean, c.exact, c.estimate.std_error);
  return r;
}

std::vector<PathwiseFunctional> test_functionals(const Setup& s) {
  const Kernel AA = Kernel::indicator({s.A, s.A}, "1_AxA");
  const MultipleIntegral I2(AA, s.nu);
  return {
      PathwiseFunctional::counting(s.A, "eta(A)"),
      PathwiseFunctional::scalar([A = s.A](const PointConfiguration& c) {
        const double k = static_cast<double>(count(c, A));
        return k * k;
      }, "eta(A)^2"),
      PathwiseFunctional::scalar([I2](const PointConfiguration& c) { return I2(c); }, "I2(1_AxA)"),
      PathwiseFunctional::scalar([B = s.B](const PointConfiguration& c) {
        return std::exp(-0.7 * static_cast<double>(count(c, B)));
      }, "exp(-0.7 eta(B))"),
  };
}

std::vector<RandomField> test_fields(const Setup& s) {
  return {
      RandomField::deterministic([A = s.A](const Location& z) { return indicator(A, z); }, "1_A"),
      RandomField::scalar([A = s.A, B = s.B](const PointConfiguration& c, const Location& z) {
        return static_cast<double>(count(c, A)) * indicator(B, z);
      }, "eta(A)1_B"),
      RandomField::scalar([A = s.A](const PointConfiguration& c, const Location& z) {
        return static_cast<double>(count(c, A)) * indicator(A, z);
      }, "eta(A)1_A"),
  };
}

}  // namespace

std::vector<InvariantResult> verify_exact_identities(const VerifyOptions& o) {
  const Setup s(o.resolution);
  std::vector<InvariantResult> out;
  const auto functionals = test_functionals(s);
  const auto fields = test_fields(s);
  const std::size_t N = o.exact_samples;

  // Add/drop chain rules for F².
  for (const PathwiseFunctional& F : functionals) {
    const PathwiseFunctional F2 = PathwiseFunctional::scalar(
        [F](const PointConfiguration& c) { return F(c)[0] * F(c)[0]; }, F.label + "^2");
    double worst_plus = 0.0, worst_minus = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const PointConfiguration eta = sample_ppp(s.nu, o.seed, i);
      const double f = F(eta)[0];
      const Location z = random_location(o.seed, i);
      const double dp = add_op(F, eta, z)[0];
      worst_plus = std::max(worst_plus, rel_err(add_op(F2, eta, z)[0], 2.0 * f * dp + dp * dp));
      if (!eta.empty()) {
        const Location x = eta[i % eta.size()];
        const double dm = drop_op(F, eta, x)[0];
        worst_minus = std::max(worst_minus, rel_err(drop_op(F2, eta, x)[0], 2.0 * f * dm - dm * dm));
      }
    }
    out.push_back(exact_result("chain_rule", "D+F^2 = 2F D+F + (D+F)^2 for " + F.label, worst_plus, o));
    out.push_back(exact_result("chain_rule", "D-F^2 = 2F D-F - (D-F)^2 for " + F.label, worst_minus, o));
  }

  // D_z δu = u(z) + δ(D⁺_z u).
  for (const RandomField& u : fields) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const PointConfiguration eta = sample_ppp(s.nu, o.seed, i);
      const Location z = random_location(o.seed + 1, i);
      const double lhs = divergence(u, eta.add_point(z), s.nu)[0] - divergence(u, eta, s.nu)[0];
      const double rhs = u(eta, z)[0] + divergence(add_op_field(u, z), eta, s.nu)[0];
      worst = std::max(worst, rel_err(lhs, rhs));
    }
    out.push_back(exact_result("heisenberg", "D_z delta u = u(z) + delta(D_z u) for " + u.label, worst, o));
  }

  // δ(Fu) = F δu − [DF, u]_η.
  for (const PathwiseFunctional& F : functionals) {
    for (const RandomField& u : fields) {
      const RandomField Fu = RandomField::scalar(
          [F, u](const PointConfiguration& c, const Location& z) { return F(c)[0] * u(c, z)[0]; });
      const RandomField DF = derivative_field(F);
      double worst = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const PointConfiguration eta = sample_ppp(s.nu, o.seed, i);
        const double lhs = divergence(Fu, eta, s.nu)[0];
        const double rhs = F(eta)[0] * divergence(u, eta, s.nu)[0] -
                           energy_bracket(DF, u, eta, s.nu, BracketKind::eta).matrix(0, 0);
        worst = std::max(worst, rel_err(lhs, rhs));
      }
      out.push_back(exact_result("divergence_product", "delta(Fu) = F delta u - [DF,u]_eta for F=" + F.label +
                                                          ", u=" + u.label, worst, o));
    }
  }

  // Q = √2 F + H.
  for (std::size_t n : {1u, 4u, 16u, 64u}) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const QuadraticValues v = evaluate_path(sample_path(n, o.seed, i));
      worst = std::max(worst, std::abs(v.Q - (std::sqrt(2.0) * v.F + v.H)) /
                                  std::max({1.0, std::abs(v.Q), std::abs(std::sqrt(2.0) * v.F), std::abs(v.H)}));
    }
    out.push_back(exact_result("quadratic", fmt::format("Q = sqrt(2) F + H at n={}", n), worst, o));
  }

  // [1_A, 1_A]_Γ = ½(ν(A) + η(A)) and (P₃) = 0 for F = η(A) − ν(A), u = 1_A.
  {
    const RandomField one_A = fields[0];
    const PathwiseFunctional F = PathwiseFunctional::scalar(
        [A = s.A](const PointConfiguration& c) { return static_cast<double>(count(c, A)) - 1.0; }, "eta(A)-nu(A)");
    double worst_bracket = 0.0, worst_p3 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const PointConfiguration eta = sample_ppp(s.nu, o.seed, i);
      const double g = energy_bracket(one_A, one_A, eta, s.nu, BracketKind::gamma).matrix(0, 0);
      worst_bracket = std::max(worst_bracket, rel_err(g, 0.5 * (1.0 + static_cast<double>(count(eta, s.A)))));
      const double f0 = F(eta)[0];
      const double p3 = s.nu.integrate([&](const Location& z) {
        const double d = F(eta.add_point(z))[0] - f0;
        return std::abs(one_A(eta, z)[0] * d * (d - 1.0));
      });
      worst_p3 = std::max(worst_p3, std::abs(p3));
    }
    out.push_back(exact_result("bracket", "[1_A,1_A]_Gamma = (nu(A) + eta(A))/2", worst_bracket, o));
    out.push_back(exact_result("conditions", "P3 = 0 for F = eta(A) - nu(A), u = 1_A", worst_p3, o));
  }
  return out;
}

std::vector<InvariantResult> verify_statistical_identities(const VerifyOptions& o) {
  const Setup s(o.resolution);
  std::vector<InvariantResult> out;
  const std::size_t R = o.replicas;
  std::uint64_t seed = o.seed;
  auto next_seed = [&] { return ++seed; };

  // Mecke formula.
  out.push_back(paired_result("mecke", "f = 1_B",
                              mecke_check([B = s.B](const PointConfiguration&, const Location& z) {
                                return indicator(B, z);
                              }, s.nu, R, next_seed()), o));
  out.push_back(paired_result("mecke", "f = eta(A) 1_B",
                              mecke_check([A = s.A, B = s.B](const PointConfiguration& c, const Location& z) {
                                return static_cast<double>(count(c, A)) * indicator(B, z);
                              }, s.nu, R, next_seed()), o));
  out.push_back(paired_result("mecke", "f = eta(A) 1_A",
                              mecke_check([A = s.A](const PointConfiguration& c, const Location& z) {
                                return static_cast<double>(count(c, A)) * indicator(A, z);
                              }, s.nu, R, next_seed()), o));

  // Itô isometry.
  const Kernel fA = Kernel::indicator({s.A}, "1_A");
  const Kernel fAA = Kernel::indicator({s.A, s.A}, "1_AxA");
  out.push_back(exact_value_result("isometry", "q=q'=1, f=g=1_A", ito_isometry_check(fA, fA, s.nu, R, next_seed()), o));
  out.push_back(exact_value_result("isometry", "q=1, q'=2", ito_isometry_check(fA, fAA, s.nu, R, next_seed()), o));
  out.push_back(exact_value_result("isometry", "q=q'=2, f=g=1_AxA",
                                   ito_isometry_check(fAA, fAA, s.nu, R, next_seed()), o));

  // Skorokhod isometry.
  for (const RandomField& u : test_fields(s))
    out.push_back(paired_result("skorokhod", "u = " + u.label, skorokhod_check(u, s.nu, R, next_seed()), o));

  // E[u,v]_Γ = E[u,v]_ν = E[u,v]_η.
  {
    const RandomField u = test_fields(s)[1];
    std::vector<double> g(R), nu(R), eta(R);
    const std::uint64_t sd = next_seed();
    parallel_for(R, [&](std::size_t r) {
      const PointConfiguration c = sample_ppp(s.nu, sd, r);
      nu[r] = energy_bracket(u, u, c, s.nu, BracketKind::nu).matrix(0, 0);
      eta[r] = energy_bracket(u, u, c, s.nu, BracketKind::eta).matrix(0, 0);
      g[r] = 0.5 * nu[r] + 0.5 * eta[r];
    });
    out.push_back(paired_result("bracket", "E[u,u]_Gamma = E[u,u]_nu, u = eta(A)1_B", compare_paired(g, nu), o));
    out.push_back(paired_result("bracket", "E[u,u]_eta = E[u,u]_nu, u = eta(A)1_B", compare_paired(eta, nu), o));
  }

  // Integrated chain rule E[D(FG),u]_Γ = E F[DG,u]_Γ + E G[DF,u]_Γ.
  {
    const PathwiseFunctional F = PathwiseFunctional::scalar(
        [A = s.A](const PointConfiguration& c) { return std::exp(-0.5 * static_cast<double>(count(c, A))); }, "F");
    const PathwiseFunctional G = PathwiseFunctional::scalar(
        [W = s.W](const PointConfiguration& c) { return std::cos(static_cast<double>(count(c, W))); }, "G");
    const RandomField u = RandomField::scalar([A = s.A](const PointConfiguration& c, const Location&) {
      return 1.0 + static_cast<double>(count(c, A));
    }, "1+eta(A)");
    out.push_back(paired_result("chain_rule", "E[D(FG),u]_Gamma = E F[DG,u]_Gamma + E G[DF,u]_Gamma",
                                chain_rule_multiplication_check(F, G, u, s.nu, R, next_seed()), o));
  }

  // E F δu = E ν(u DF).
  {
    const auto fields = test_fields(s);
    const auto functionals = test_functionals(s);
    out.push_back(paired_result("ibp", "F = eta(A), u = 1_A", ibp_check(functionals[0], fields[0], s.nu, R, next_seed()), o));
    out.push_back(paired_result("ibp", "F = eta(A)^2, u = eta(A)1_B",
                                ibp_check(functionals[1], fields[1], s.nu, R, next_seed()), o));
  }
  return out;
}

std::vector<InvariantResult> verify_module_invariants(const VerifyOptions& o) {
  const Setup s(o.resolution);
  std::vector<InvariantResult> out;
  const std::size_t R = o.replicas;
  const std::size_t N = o.exact_samples;

  // Symmetrisation is idempotent.
  {
    const Kernel f2{2, [](std::span<const Location> x) { return std::sin(3.0 * x[0][0]) * x[1][0] + x[0][0]; },
                    false, "f2"};
    const Kernel f3{3, [](std::span<const Location> x) {
                      return x[0][0] * x[1][0] * x[1][0] + std::cos(x[2][0]) * x[0][0];
                    }, false, "f3"};
    double worst = 0.0;
    for (const Kernel& f : {f2, f3}) {
      const Kernel once = symmetrize(f);
      Kernel twice = symmetrize(Kernel{once.order, once.eval, false, "once"});
      std::vector<Location> args(f.order);
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t k = 0; k < f.order; ++k) args[k] = random_location(o.seed + 7 + k, i);
        worst = std::max(worst, rel_err(once(args), twice(args)));
      }
    }
    out.push_back(exact_result("chaos", "symmetrize is idempotent (q=2,3)", worst, o));
  }

  // Product formula for first-order indicator kernels, pathwise.
  {
    const Kernel fA = Kernel::indicator({s.A}, "1_A");
    const Kernel fW = Kernel::indicator({s.W}, "1_W");
    double worst = 0.0;
    for (const auto& [f, g] : {std::pair{fA, fA}, std::pair{fA, fW}}) {
      const PathwiseFunctional expanded = as_pathwise(product_expand(f, g, s.nu), s.nu);
      const MultipleIntegral If(f, s.nu), Ig(g, s.nu);
      for (std::size_t i = 0; i < N; ++i) {
        const PointConfiguration eta = sample_ppp(s.nu, o.seed, i);
        worst = std::max(worst, rel_err(If(eta) * Ig(eta), expanded(eta)[0]));
      }
    }
    out.push_back(exact_result("chaos", "I_1(f) I_1(g) = product expansion", worst, o));
  }

  // L⁻¹ contracts the energy.
  {
    const Kernel h1 = Kernel::indicator({s.A}, "1_A");
    const Kernel h2 = Kernel::indicator({s.A, s.B}, "1_AxB");
    const ChaosFunctional F({h1, symmetrize(h2), Kernel::indicator({s.W, s.W}, "1_WxW").scaled(0.3)});
    const double eF = chaos_energy(F, s.nu);
    const double eL = chaos_energy(pseudo_inverse(F), s.nu);
    InvariantResult r;
    r.group = "malliavin";
    r.name = "E int |D L^-1 F|^2 <= E int |DF|^2";
    r.exact = true;
    r.statistic = eL - eF;
    r.threshold = 0.0;
    r.passed = eL <= eF;
    r.detail = fmt::format("{:.6g} <= {:.6g}", eL, eF);
    out.push_back(r);
  }

  // Taylor formula for D⁺φ(F), φ(x) = x³.
  {
    const auto phi = [](double x) { return x * x * x; };
    const auto phi2 = [](double x) { return 6.0 * x; };
    double worst = 0.0;
    const auto functionals = test_functionals(s);
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < N; ++i) {
        const PointConfiguration eta = sample_ppp(s.nu, o.seed, i);
        const ChainRuleDifference d = chain_rule_difference(phi, phi2, functionals[k], eta, random_location(o.seed, i));
        worst = std::max(worst, rel_err(d.lhs, d.rhs));
      }
    }
    out.push_back(exact_result("malliavin", "D+ phi(F) Taylor formula, phi = x^3", worst, o));
  }

  // Mixtures: unconditional CF equals the mean conditional CF.
  {
    const PathwiseFunctional S = PathwiseFunctional::scalar(
        [A = s.A](const PointConfiguration& c) { return 0.5 + static_cast<double>(count(c, A)); }, "S");
    const PathwiseFunctional M = PathwiseFunctional::scalar(
        [A = s.A](const PointConfiguration& c) { return 0.5 * (1.0 + static_cast<double>(count(c, A))); }, "M");
    const std::uint64_t sd = o.seed + 101;
    for (const MixtureSpec& spec : {MixtureSpec::gaussian(S), MixtureSpec::poisson(M)}) {
      const double lambda = 0.8;
      std::vector<double> re(R), im(R), cre(R), cim(R);
      parallel_for(R, [&](std::size_t r) {
        const PointConfiguration eta = sample_ppp(s.nu, sd, r);
        const double x = sample_mixture(spec, eta, sd, r)[0];
        re[r] = std::cos(lambda * x);
        im[r] = std::sin(lambda * x);
        const std::complex<double> c = conditional_cf(spec, eta, Value::Constant(1, lambda));
        cre[r] = c.real();
        cim[r] = c.imag();
      });
      const std::string kind = spec.kind == MixtureKind::gaussian ? "gaussian" : "poisson";
      out.push_back(paired_result("mixtures", kind + ": E cos(lambda X) = E Re cf", compare_paired(re, cre), o));
      out.push_back(paired_result("mixtures", kind + ": E sin(lambda X) = E Im cf", compare_paired(im, cim), o));
    }

    // Po(M) with M = ½(ν(A) + η(A)) differs in law from η(A) − ν(A).
    const MixtureSpec po = MixtureSpec::poisson(M);
    const double lambda = std::numbers::pi;
    std::vector<double> re(R), im(R);
    parallel_for(R, [&](std::size_t r) {
      const PointConfiguration eta = sample_ppp(s.nu, sd + 1, r);
      const double x = sample_mixture(po, eta, sd + 1, r)[0];
      re[r] = std::cos(lambda * x);
      im[r] = std::sin(lambda * x);
    });
    const Estimate er = estimate_mean(re), ei = estimate_mean(im);
    const std::complex<double> target = compensated_poisson_cf(1.0, lambda);
    const double dist = std::abs(std::complex<double>(er.mean, ei.mean) - target);
    const double se = std::hypot(er.std_error, ei.std_error);
    InvariantResult r;
    r.group = "mixtures";
    r.name = "Po((nu(A)+eta(A))/2) differs from eta(A)-nu(A) at lambda=pi";
    r.statistic = se > 0.0 ? dist / se : 0.0;
    r.threshold = 5.0;
    r.passed = r.statistic > 5.0;
    r.detail = fmt::format("cf distance {:.4g}, se {:.3e}", dist, se);
    out.push_back(r);
  }
  return out;
}

std::vector<InvariantResult> run_verify_suite(const VerifyOptions& options) {
  std::vector<InvariantResult> all = verify_exact_identities(options);
  for (auto&& part : {verify_statistical_identities(options), verify_module_invariants(options)})
    all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace poismix
