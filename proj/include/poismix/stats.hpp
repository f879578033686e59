#pragma once

#include <cstddef>
#include <span>

namespace poismix {

/// Pairwise (cascade) summation; the reduction order depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

Estimate estimate_mean(std::span<const double> samples);

/// Comparison of two Monte Carlo estimates computed on the same replicas; the
/// standard error is that of the per-replica difference.
struct PairedComparison {
  Estimate lhs;
  Estimate rhs;
  double difference = 0.0;
  double std_error = 0.0;

  double z() const;
  /// |difference| <= z_max * std_error, with a rounding allowance when the
  /// difference is degenerate.
  bool agrees(double z_max) const;
};

PairedComparison compare_paired(std::span<const double> lhs, std::span<const double> rhs);

/// Comparison of a Monte Carlo estimate with an exact value.
struct ExactComparison {
  Estimate estimate;
  double exact = 0.0;

  double z() const;
  bool agrees(double z_max) const;
};

}  // namespace poismix
