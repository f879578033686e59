#include "poismix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace poismix {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate estimate_mean(std::span<const double> samples) {
  Estimate e;
  e.count = samples.size();
  if (samples.empty()) return e;
  e.mean = pairwise_sum(samples) / static_cast<double>(samples.size());
  if (samples.size() < 2) return e;
  std::vector<double> sq(samples.size());
  std::transform(samples.begin(), samples.end(), sq.begin(), [&](double x) {
    const double d = x - e.mean;
    return d * d;
  });
  const double var = pairwise_sum(sq) / static_cast<double>(samples.size() - 1);
  e.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  return e;
}

namespace {

double rounding_allowance(double a, double b) {
  return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double PairedComparison::z() const {
  if (std_error > 0.0) return difference / std_error;
  return difference == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), difference);
}

bool PairedComparison::agrees(double z_max) const {
  return std::abs(difference) <= z_max * std_error + rounding_allowance(lhs.mean, rhs.mean);
}

PairedComparison compare_paired(std::span<const double> lhs, std::span<const double> rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("compare_paired: sample counts differ");
  PairedComparison c;
  c.lhs = estimate_mean(lhs);
  c.rhs = estimate_mean(rhs);
  std::vector<double> diff(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
  const Estimate d = estimate_mean(diff);
  c.difference = d.mean;
  c.std_error = d.std_error;
  return c;
}

double ExactComparison::z() const {
  const double diff = estimate.mean - exact;
  if (estimate.std_error > 0.0) return diff / estimate.std_error;
  return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

bool ExactComparison::agrees(double z_max) const {
  return std::abs(estimate.mean - exact) <=
         z_max * estimate.std_error + rounding_allowance(estimate.mean, exact);
}

}  // namespace poismix
