#include "poismix/mixtures.hpp"

#include <cmath>
#include <random>

namespace poismix {

MixtureSpec MixtureSpec::gaussian(PathwiseFunctional S) {
  const auto d = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(S.dim))));
  if (d * d != S.dim) throw Error("gaussian mixture: directing functional must have square dimension");
  return {MixtureKind::gaussian, std::move(S)};
}

MixtureSpec MixtureSpec::poisson(PathwiseFunctional M) {
  if (M.dim != 1) throw Error("poisson mixture: directing functional must be scalar");
  return {MixtureKind::poisson, std::move(M)};
}

std::size_t MixtureSpec::dim() const {
  if (kind == MixtureKind::poisson) return 1;
  return static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(directing.dim))));
}

Eigen::MatrixXd MixtureSpec::scale_matrix(const PointConfiguration& config) const {
  if (kind != MixtureKind::gaussian) throw Error("scale_matrix: gaussian mixture required");
  const auto d = static_cast<Eigen::Index>(dim());
  const Value s = directing(config);
  return Eigen::Map<const Eigen::MatrixXd>(s.data(), d, d);
}

double MixtureSpec::poisson_mean(const PointConfiguration& config) const {
  if (kind != MixtureKind::poisson) throw Error("poisson_mean: poisson mixture required");
  const double m = directing(config)[0];
  if (!(m >= 0.0) || !std::isfinite(m)) throw Error("poisson mixture: directing value must be finite and >= 0");
  return m;
}

Value sample_mixture(const MixtureSpec& spec, const PointConfiguration& config, Rng& rng) {
  if (spec.kind == MixtureKind::gaussian) {
    const Eigen::MatrixXd S = spec.scale_matrix(config);
    std::normal_distribution<double> normal;
    Value n(S.cols());
    for (Eigen::Index i = 0; i < n.size(); ++i) n[i] = normal(rng);
    return S * n;
  }
  const double m = spec.poisson_mean(config);
  if (m == 0.0) return Value::Zero(1);
  std::poisson_distribution<long long> poisson(m);
  return Value::Constant(1, static_cast<double>(poisson(rng)) - m);
}

Value sample_mixture(const MixtureSpec& spec, const PointConfiguration& config, std::uint64_t seed,
                     std::uint64_t replica) {
  Rng rng = make_stream(seed, replica, StreamTag::mixture_noise);
  return sample_mixture(spec, config, rng);
}

std::complex<double> compensated_poisson_cf(double m, double lambda) {
  const std::complex<double> i(0.0, 1.0);
  return std::exp(m * (std::exp(i * lambda) - i * lambda - 1.0));
}

std::complex<double> conditional_cf(const MixtureSpec& spec, const PointConfiguration& config, const Value& lambda) {
  if (static_cast<std::size_t>(lambda.size()) != spec.dim()) throw Error("conditional_cf: lambda has the wrong dimension");
  if (spec.kind == MixtureKind::gaussian) {
    const Eigen::MatrixXd S = spec.scale_matrix(config);
    return {std::exp(-0.5 * (S.transpose() * lambda).squaredNorm()), 0.0};
  }
  return compensated_poisson_cf(spec.poisson_mean(config), lambda[0]);
}

}  // namespace poismix
