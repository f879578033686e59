#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poismix/functionals.hpp"
#include "poismix/malliavin.hpp"

namespace poismix {

struct BoundTerm {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
};

struct BoundReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta1_std_error = 0.0;
  double delta2_std_error = 0.0;
  double d1_bound = 0.0;
  /// Delta-method standard error of d1_bound.
  double d1_std_error = 0.0;
  std::optional<double> d3_bound;
  std::vector<BoundTerm> terms;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  /// Per-replica values of F (d1_bound only).
  std::vector<double> f_samples;

  const BoundTerm* term(const std::string& name) const;
};

/// max((2^{1/3} + 2^{−2/3}) Δ₁^{2/3} Δ₂^{1/3}, Δ₁Δ₂).
double d1_from_deltas(double delta1, double delta2);

/// ¼ E|sym[u, DF]_β − SSᵀ| + ⅓ E|[u, (DS)Sᵀ]_β| + ⅙ E ∫ |u(z)| (|D_zF|² + |D_zS|²) ν(dz),
/// Frobenius norms; S is d×d, column-major in a functional of dimension d².
BoundReport d3_bound(const PathwiseFunctional& F, const RandomField& u, const PathwiseFunctional& S,
                     const IntensityMeasure& intensity, std::size_t replicas, std::uint64_t seed,
                     BracketKind kind = BracketKind::nu);

/// Δ₁ = (2/π)^{1/2}(2 + E|S|) + E|F|,
/// Δ₂ = ¼(2/π)^{1/2} E|ν(uDF) − S²| + 2^{1/2}(⅓ E|S ν(uDS)| + ⅙ E ν(|u|(|DF|² + |DS|²))).
/// Univariate F, u, S.
BoundReport d1_bound(const PathwiseFunctional& F, const RandomField& u, const PathwiseFunctional& S,
                     const IntensityMeasure& intensity, std::size_t replicas, std::uint64_t seed);

/// within + (2/π)^{1/2} empirical_d1(S_n samples, S samples).
BoundReport d1_bound_sequence(const BoundReport& within, std::span<const double> sn_samples,
                              std::span<const double> s_samples);

/// (1/n) Σ |a_(i) − b_(i)| over sorted samples; equal sizes required.
double empirical_d1(std::span<const double> a, std::span<const double> b);

struct CfPoint {
  Value lambda;
  std::complex<double> cf_a;
  std::complex<double> cf_b;
  double distance = 0.0;
  /// sqrt(Var_a/n_a + Var_b/n_b) of the weighted complex exponentials.
  double pooled_std_error = 0.0;

  double ratio() const { return pooled_std_error > 0.0 ? distance / pooled_std_error : (distance == 0.0 ? 0.0 : INFINITY); }
};

struct CfComparison {
  std::vector<CfPoint> points;
  /// max over the grid of |Ĉ_a(λ) − Ĉ_b(λ)|.
  double distance = 0.0;
  /// max over the grid of distance / pooled standard error.
  double max_ratio = 0.0;
};

/// Weighted empirical characteristic functions (1/n) Σ w_i e^{i⟨λ, x_i⟩}
/// compared on a λ grid. Empty weight spans mean unit weights.
CfComparison cf_comparison(std::span<const Value> samples_a, std::span<const double> weights_a,
                           std::span<const Value> samples_b, std::span<const double> weights_b,
                           std::span<const Value> lambda_grid);

double cf_distance(std::span<const Value> samples_a, std::span<const double> weights_a,
                   std::span<const Value> samples_b, std::span<const double> weights_b,
                   std::span<const Value> lambda_grid);

}  // namespace poismix
