#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poismix/chaos.hpp"
#include "poismix/functionals.hpp"
#include "poismix/malliavin.hpp"
#include "poismix/stats.hpp"

namespace poismix {

enum class ConditionTag { R3, R4, P3, P4, S_nu, S_gamma, W_nu, W_gamma, M_nu };

const char* to_string(ConditionTag tag);
/// Parses "R3", "S_nu", ...; throws Error on an unknown name.
ConditionTag parse_condition_tag(const std::string& name);

/// Extra inputs of a condition: h for W_nu, G for W_gamma, and the limit
/// (S with SSᵀ, resp. M) for the S and M tags.
struct ConditionAux {
  std::optional<RandomField> h;
  std::optional<PathwiseFunctional> G;
  std::optional<PathwiseFunctional> target;
  bool keep_samples = false;
};

struct ConditionEstimate {
  ConditionTag tag = ConditionTag::R3;
  std::string probe;
  /// Monte Carlo mean of the quantity (a 1×1 matrix for scalar tags).
  Eigen::MatrixXd value;
  /// Largest entrywise standard error.
  double std_error = 0.0;
  /// E|bracket − target|_F for S/M tags with a target, E|bracket|_F for W tags.
  std::optional<Estimate> l1_distance;
  std::size_t n_index = 0;
  /// Per-replica Frobenius norms of the quantity, when requested.
  std::vector<double> samples;
};

ConditionEstimate estimate_condition(ConditionTag tag, const PathwiseFunctional& F, const RandomField& u,
                                     const ConditionAux& aux, const IntensityMeasure& intensity,
                                     std::size_t replicas, std::uint64_t seed, std::size_t n_index = 0);

/// Indicators of the dyadic subintervals of levels 0–2 and the Legendre
/// polynomials P0–P3, all along the first axis of the window.
std::vector<RandomField> probe_fields(const IntensityMeasure& intensity);
/// e^{−c η(B)} for c ∈ {½, 1, 2} and B a dyadic subinterval of level 0–2.
std::vector<PathwiseFunctional> probe_functionals(const IntensityMeasure& intensity);

/// Runs W_nu over probe_fields or W_gamma over probe_functionals.
std::vector<ConditionEstimate> estimate_probes(ConditionTag tag, const PathwiseFunctional& F, const RandomField& u,
                                               const IntensityMeasure& intensity, std::size_t replicas,
                                               std::uint64_t seed, std::size_t n_index = 0);

enum class KernelConditionTag { KS, KR4, KRstar, KW, KP4 };

const char* to_string(KernelConditionTag tag);
KernelConditionTag parse_kernel_condition_tag(const std::string& name);

struct KernelConditionResult {
  KernelConditionTag tag = KernelConditionTag::KS;
  /// KS: ν²(g ĝ); KR4: ‖g‖_{L⁴(ν²)}; KRstar: ‖g ⋆₂¹ g‖_{L²(ν)}; KW: ‖ĝ ⋆₁¹ h‖_{L²(ν)};
  /// KP4: ν²(g²(g − ½)²).
  double value = 0.0;
  /// KS only: g ⋆₁¹ ĝ.
  std::optional<Kernel> kernel;
};

/// Checks that ĝ symmetrizes to g on random tuples of the window; throws
/// Error on a mismatch.
void check_symmetrization(const Kernel& g, const Kernel& g_hat, const IntensityMeasure& intensity,
                          std::size_t tuples = 64, std::uint64_t seed = 0x5eed);

KernelConditionResult kernel_condition(KernelConditionTag tag, const Kernel& g, const Kernel& g_hat,
                                       const Kernel& h, const IntensityMeasure& intensity);

}  // namespace poismix
