#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "poismix/bounds.hpp"
#include "poismix/point_process.hpp"
#include "poismix/stats.hpp"

namespace poismix {

/// Jump times of a unit-rate Poisson process on [0, n], increasing.
struct PoissonPath {
  std::size_t n = 1;
  std::vector<double> jumps;
};

/// Exponential spacings; stream (seed, replica, configuration).
PoissonPath sample_path(std::size_t n, std::uint64_t seed, std::uint64_t replica);

/// Per-path values of the quadratic functional and its pieces, all exact:
///   Q = (n^{3/2}/√2) ∫₀¹ t^{n−1} ((n^{−1/2}N̂_n)² − (n^{−1/2}N̂_{nt})²) dt,
///   F = n^{−1/2−n} ∫₀ⁿ N̂_{s−} sⁿ dN̂_s,  H = (n/2)^{1/2} ∫₀¹ t^{n−1}(N_n − N_{nt}) dt,
///   X = n^{−1/2} N̂_n,  Y = n^{−n} ∫₀ⁿ sⁿ dN̂_s.
struct QuadraticValues {
  double Q = 0.0, F = 0.0, H = 0.0, X = 0.0, Y = 0.0;
};

QuadraticValues evaluate_path(const PoissonPath& path);

/// The t-integrand of Q at t ∈ [0, 1], including the n^{3/2}/√2 factor.
double quadratic_integrand(const PoissonPath& path, double t);

/// The path as a configuration of `window`, a unit-rate intensity on [0, n].
PointConfiguration as_configuration(const PoissonPath& path, const IntensityMeasure& window);

struct MomentRow {
  std::string name;
  std::size_t n = 0;
  Estimate estimate;
  double exact = 0.0;

  double z() const { return ExactComparison{estimate, exact}.z(); }
};

struct FourthMomentStat {
  /// E X⁴ − 3 (E X²)².
  double value = 0.0;
  /// Bootstrap standard error.
  double std_error = 0.0;
};

struct QuadraticRunResult {
  std::size_t n = 0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples_Q, samples_F, samples_H, samples_X, samples_Y;
  /// |Q − (√2F + H)| maximised over replicas, relative to max(1, |Q|, |√2F|, |H|).
  double max_decomposition_residual = 0.0;
  std::vector<MomentRow> moment_table;
  FourthMomentStat fm_X, fm_Y;
  /// empirical_d1(Q, X·N) with N independent standard normal.
  double d1_to_limit = 0.0;
};

QuadraticRunResult simulate_Qn(std::size_t n, std::size_t replicas, std::uint64_t seed,
                               std::size_t bootstrap_resamples = 200);

/// Closed-form moments of X, Y, H and the XY covariance against their
/// Monte Carlo estimates.
std::vector<MomentRow> moment_checks(const QuadraticRunResult& result);

/// Fourth-cumulant statistic with a bootstrap standard error (stream tag
/// bootstrap, `resamples` draws).
FourthMomentStat fourth_moment_diag(std::span<const double> samples, std::uint64_t seed,
                                    std::size_t resamples = 200);

/// ψ = c · n^{−1/2} · 1_{[a·n, b·n)}; the probe weight is G = e^{−η(ψ)}.
struct StableProbe {
  std::string label;
  double c = 1.0;
  double a = 0.0;
  double b = 1.0;
};

std::vector<StableProbe> default_stable_probes();
std::vector<double> default_lambda_grid();

struct StableTestRow {
  std::string probe;
  double lambda = 0.0;
  double distance = 0.0;
  double pooled_std_error = 0.0;

  double ratio() const { return pooled_std_error > 0.0 ? distance / pooled_std_error : 0.0; }
};

struct StableTestReport {
  std::size_t n = 0;
  std::vector<StableTestRow> rows;
  double max_distance = 0.0;
  double max_ratio = 0.0;
};

/// cf_comparison of F and mixture samples built on the same configurations,
/// once per probe weight vector (each normalised by its empirical mean).
StableTestReport stable_test(std::span<const Value> f_samples, std::span<const Value> mixture_samples,
                             std::span<const std::vector<double>> probe_weights,
                             std::span<const std::string> probe_labels, std::span<const double> lambda_grid);

/// Q_n against N(0, X²) with X = n^{−1/2}N̂_n on the same path; the mixture
/// noise uses the mixture_noise stream of each replica.
StableTestReport quadratic_stable_test(const QuadraticRunResult& result, std::span<const StableProbe> probes,
                                       std::span<const double> lambda_grid);

/// E ∫₀ⁿ |u_n(s)| |D⁺_s F_n|² ds and E ∫₀ⁿ |D⁺_s F_n|⁴ ds with
/// u_n(s) = n^{−1/2} N̂_s (s/n)ⁿ, by the midpoint rule with `nodes` cells.
struct QuadraticRemainders {
  Estimate r3;
  Estimate r4;
};

QuadraticRemainders quadratic_remainders(std::size_t n, std::size_t replicas, std::uint64_t seed,
                                         std::size_t nodes = 256);

}  // namespace poismix
