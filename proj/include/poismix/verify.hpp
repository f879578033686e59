#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace poismix {

struct VerifyOptions {
  std::size_t replicas = 100000;
  std::uint64_t seed = 20240601;
  /// Midpoint cells of the unit-window intensity used by the statistical checks.
  std::size_t resolution = 16;
  /// Configurations (or paths) visited by each exact identity.
  std::size_t exact_samples = 200;
  double z_max = 4.0;
  double exact_tolerance = 1e-12;
};

struct InvariantResult {
  std::string group;
  std::string name;
  bool exact = false;
  /// Largest relative error (exact checks) or |z| (statistical checks).
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

/// Pathwise identities checked to relative tolerance on sampled configurations.
std::vector<InvariantResult> verify_exact_identities(const VerifyOptions& options);
/// Expectation identities checked by Monte Carlo z-scores.
std::vector<InvariantResult> verify_statistical_identities(const VerifyOptions& options);
/// Remaining module invariants (symmetrisation, product formula, mixtures, ...).
std::vector<InvariantResult> verify_module_invariants(const VerifyOptions& options);

std::vector<InvariantResult> run_verify_suite(const VerifyOptions& options);

}  // namespace poismix
