#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "poismix/functionals.hpp"

namespace poismix {

enum class MixtureKind { gaussian, poisson };

/// Target law N(0, S²) (S a d×d matrix, stored column-major in a functional
/// of dimension d²) or Po(M) (M ≥ 0 scalar).
struct MixtureSpec {
  MixtureKind kind = MixtureKind::gaussian;
  PathwiseFunctional directing;

  static MixtureSpec gaussian(PathwiseFunctional S);
  static MixtureSpec poisson(PathwiseFunctional M);

  /// Dimension of the mixture variable.
  std::size_t dim() const;
  /// S(η) as a d×d matrix; gaussian only.
  Eigen::MatrixXd scale_matrix(const PointConfiguration& config) const;
  /// M(η); poisson only. Throws if negative.
  double poisson_mean(const PointConfiguration& config) const;
};

/// S(η)·N or Poisson(M(η)) − M(η); the noise is drawn from `rng`, which must
/// be independent of the configuration.
Value sample_mixture(const MixtureSpec& spec, const PointConfiguration& config, Rng& rng);
/// Same, with the noise stream (seed, replica, mixture_noise).
Value sample_mixture(const MixtureSpec& spec, const PointConfiguration& config, std::uint64_t seed,
                     std::uint64_t replica);

/// exp(−½|Sᵀλ|²) or exp(M(e^{iλ} − iλ − 1)).
std::complex<double> conditional_cf(const MixtureSpec& spec, const PointConfiguration& config, const Value& lambda);

/// exp(m(e^{iλ} − iλ − 1)): characteristic function of Poisson(m) − m.
std::complex<double> compensated_poisson_cf(double m, double lambda);

}  // namespace poismix
