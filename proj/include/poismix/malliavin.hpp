#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "poismix/chaos.hpp"
#include "poismix/functionals.hpp"
#include "poismix/stats.hpp"

namespace poismix {

/// δu = Σ_{z∈η} u(η − δ_z, z) − ∫ u(η, z) ν(dz).
Value divergence(const RandomField& u, const PointConfiguration& config, const IntensityMeasure& intensity);

/// LF: the order-q term is scaled by −q.
ChaosFunctional ou_generator(const ChaosFunctional& F);
/// L⁻¹F: the order-q term is scaled by −1/q. Throws unless the order-0 term
/// vanishes.
ChaosFunctional pseudo_inverse(const ChaosFunctional& F);

/// −D_z L⁻¹F = Σ_q I_{q−1}(h_q(z, ·)).
RandomField canonical_field(const ChaosFunctional& F, const IntensityMeasure& intensity);

/// E ∫ ⟨D⁺_z F, D⁺_z G⟩ ν(dz).
Estimate dirichlet_energy(const PathwiseFunctional& F, const PathwiseFunctional& G,
                          const IntensityMeasure& intensity, std::size_t replicas, std::uint64_t seed);

/// Γ(F) = ½ ∫ (D⁺_z F)² ν(dz) + ½ ∫ (D⁻_z F)² η(dz).
double carre_du_champ(const PathwiseFunctional& F, const PointConfiguration& config,
                      const IntensityMeasure& intensity);
/// Γ(F, G) = ½ ∫ D⁺F D⁺G dν + ½ ∫ D⁻F D⁻G dη.
double carre_du_champ(const PathwiseFunctional& F, const PathwiseFunctional& G,
                      const PointConfiguration& config, const IntensityMeasure& intensity);

enum class BracketKind { gamma, nu, eta };

const char* to_string(BracketKind kind);

struct EnergyBracketResult {
  Eigen::MatrixXd matrix;
  BracketKind kind = BracketKind::gamma;
};

/// [u, v]_ν = ∫ u ⊗ v dν, [u, v]_η = ∫ (1 − D⁻)u ⊗ (1 − D⁻)v dη,
/// [u, v]_Γ = ½ [u, v]_ν + ½ [u, v]_η.
EnergyBracketResult energy_bracket(const RandomField& u, const RandomField& v, const PointConfiguration& config,
                                   const IntensityMeasure& intensity, BracketKind kind);

/// E ⟨F, δu⟩ against E ∫ ⟨u(z), D⁺_z F⟩ ν(dz).
PairedComparison ibp_check(const PathwiseFunctional& F, const RandomField& u, const IntensityMeasure& intensity,
                           std::size_t replicas, std::uint64_t seed);

/// E (δu)² against E ∫ u² dν + E ∫∫ D⁺_z u(z′) D⁺_{z′} u(z) ν(dz) ν(dz′); scalar u.
PairedComparison skorokhod_check(const RandomField& u, const IntensityMeasure& intensity, std::size_t replicas,
                                 std::uint64_t seed);

/// E [D(FG), u]_Γ against E F [DG, u]_Γ + E G [DF, u]_Γ; scalar F, G, u.
PairedComparison chain_rule_multiplication_check(const PathwiseFunctional& F, const PathwiseFunctional& G,
                                                 const RandomField& u, const IntensityMeasure& intensity,
                                                 std::size_t replicas, std::uint64_t seed);

/// ∫₀¹∫₀¹ α φ''(x + α + αβ(h − 1)) dα dβ by tensor Gauss–Legendre.
double chain_rule_remainder(const std::function<double(double)>& phi2, double x, double h);

struct ChainRuleDifference {
  double lhs = 0.0;  // D⁺_z φ(F)
  double rhs = 0.0;  // D⁺F (φ(F+1) − φ(F)) + D⁺F (D⁺F − 1) · remainder
};

/// Both sides of the Taylor formula for D⁺φ(F) at one configuration and z.
ChainRuleDifference chain_rule_difference(const std::function<double(double)>& phi,
                                          const std::function<double(double)>& phi2, const PathwiseFunctional& F,
                                          const PointConfiguration& config, const Location& z);

}  // namespace poismix
