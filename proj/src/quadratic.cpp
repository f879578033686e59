#include "poismix/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "poismix/mixtures.hpp"
#include "poismix/parallel.hpp"

namespace poismix {

PoissonPath sample_path(std::size_t n, std::uint64_t seed, std::uint64_t replica) {
  if (n == 0) throw Error("sample_path: n must be positive");
  Rng rng = make_stream(seed, replica, StreamTag::configuration);
  std::exponential_distribution<double> spacing(1.0);
  PoissonPath path;
  path.n = n;
  const double horizon = static_cast<double>(n);
  double t = spacing(rng);
  while (t <= horizon) {
    path.jumps.push_back(t);
    t += spacing(rng);
  }
  return path;
}

QuadraticValues evaluate_path(const PoissonPath& path) {
  const double n = static_cast<double>(path.n);
  const double sqrt_n = std::sqrt(n);
  const std::size_t k = path.jumps.size();
  QuadraticValues v;
  v.X = (static_cast<double>(k) - n) / sqrt_n;

  double sum_tn = 0.0, jump_part = 0.0, comp_part = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double tau = path.jumps[i];
    const double t = tau / n;
    const double tn = std::pow(t, n);
    sum_tn += tn;
    jump_part += (static_cast<double>(i) - tau) * tn;
    comp_part += 1.0 - tn * t;
  }
  v.Y = sum_tn - n / (n + 1.0);
  v.H = sum_tn / std::sqrt(2.0 * n);
  v.F = jump_part / sqrt_n - sqrt_n * (comp_part / (n + 1.0) - n / (n + 2.0));

  // ∫₀¹ t^{n−1}(c − n t)² dt on each interval where the count c is constant.
  double integral = 0.0;
  double a = 0.0, an = 0.0, an1 = 0.0, an2 = 0.0;
  for (std::size_t c = 0; c <= k; ++c) {
    const double b = c < k ? path.jumps[c] / n : 1.0;
    const double bn = std::pow(b, n), bn1 = bn * b, bn2 = bn1 * b;
    const double cc = static_cast<double>(c);
    integral += cc * cc * (bn - an) / n - 2.0 * cc * n * (bn1 - an1) / (n + 1.0) + n * n * (bn2 - an2) / (n + 2.0);
    a = b;
    an = bn;
    an1 = bn1;
    an2 = bn2;
  }
  (void)a;
  v.Q = sqrt_n / std::sqrt(2.0) * (v.X * v.X - integral);
  return v;
}

double quadratic_integrand(const PoissonPath& path, double t) {
  const double n = static_cast<double>(path.n);
  const double count = static_cast<double>(
      std::upper_bound(path.jumps.begin(), path.jumps.end(), n * t) - path.jumps.begin());
  const double x = (static_cast<double>(path.jumps.size()) - n) / std::sqrt(n);
  const double xt = (count - n * t) / std::sqrt(n);
  return std::pow(n, 1.5) / std::sqrt(2.0) * std::pow(t, n - 1.0) * (x * x - xt * xt);
}

PointConfiguration as_configuration(const PoissonPath& path, const IntensityMeasure& window) {
  std::vector<Location> pts;
  pts.reserve(path.jumps.size());
  for (double tau : path.jumps) pts.emplace_back(tau);
  return PointConfiguration(window, std::move(pts));
}

FourthMomentStat fourth_moment_diag(std::span<const double> samples, std::uint64_t seed, std::size_t resamples) {
  auto stat = [](auto&& at, std::size_t count) {
    std::vector<double> m2(count), m4(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double x2 = at(i) * at(i);
      m2[i] = x2;
      m4[i] = x2 * x2;
    }
    const double e2 = pairwise_sum(m2) / static_cast<double>(count);
    const double e4 = pairwise_sum(m4) / static_cast<double>(count);
    return e4 - 3.0 * e2 * e2;
  };
  FourthMomentStat out;
  const std::size_t n = samples.size();
  if (n == 0) return out;
  out.value = stat([&](std::size_t i) { return samples[i]; }, n);
  if (resamples < 2) return out;
  std::vector<double> boot(resamples);
  parallel_for(resamples, [&](std::size_t b) {
    Rng rng = make_stream(seed, b, StreamTag::bootstrap);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (std::size_t& i : idx) i = pick(rng);
    boot[b] = stat([&](std::size_t i) { return samples[idx[i]]; }, n);
  });
  const Estimate e = estimate_mean(boot);
  out.std_error = e.std_error * std::sqrt(static_cast<double>(resamples));
  return out;
}

std::vector<MomentRow> moment_checks(const QuadraticRunResult& result) {
  const double n = static_cast<double>(result.n);
  const std::size_t R = result.replicas;
  std::vector<double> buf(R);
  auto row = [&](const std::string& name, auto&& f, double exact) {
    for (std::size_t r = 0; r < R; ++r) buf[r] = f(r);
    return MomentRow{name, result.n, estimate_mean(buf), exact};
  };
  const auto& X = result.samples_X;
  const auto& Y = result.samples_Y;
  const auto& H = result.samples_H;
  return {
      row("E[X^2]", [&](std::size_t r) { return X[r] * X[r]; }, 1.0),
      row("E[X^4]", [&](std::size_t r) { return std::pow(X[r], 4); }, 3.0 + 1.0 / n),
      row("E[Y^2]", [&](std::size_t r) { return Y[r] * Y[r]; }, n / (2.0 * n + 1.0)),
      row("E[Y^4]", [&](std::size_t r) { return std::pow(Y[r], 4); },
          n / (4.0 * n + 1.0) + 3.0 * n * n / ((2.0 * n + 1.0) * (2.0 * n + 1.0))),
      row("E|H|", [&](std::size_t r) { return std::abs(H[r]); }, std::sqrt(n) / (std::sqrt(2.0) * (n + 1.0))),
      row("E[XY]", [&](std::size_t r) { return X[r] * Y[r]; }, std::sqrt(n) / (n + 1.0)),
  };
}

QuadraticRunResult simulate_Qn(std::size_t n, std::size_t replicas, std::uint64_t seed,
                               std::size_t bootstrap_resamples) {
  if (replicas == 0) throw Error("simulate_Qn: replicas must be positive");
  QuadraticRunResult res;
  res.n = n;
  res.replicas = replicas;
  res.seed = seed;
  std::vector<QuadraticValues> vals(replicas);
  std::vector<double> noise(replicas), residual(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    vals[r] = evaluate_path(sample_path(n, seed, r));
    Rng rng = make_stream(seed, r, StreamTag::mixture_noise);
    noise[r] = std::normal_distribution<double>()(rng);
    const QuadraticValues& v = vals[r];
    const double scale = std::max({1.0, std::abs(v.Q), std::abs(std::sqrt(2.0) * v.F), std::abs(v.H)});
    residual[r] = std::abs(v.Q - (std::sqrt(2.0) * v.F + v.H)) / scale;
  });
  res.samples_Q.resize(replicas);
  res.samples_F.resize(replicas);
  res.samples_H.resize(replicas);
  res.samples_X.resize(replicas);
  res.samples_Y.resize(replicas);
  std::vector<double> limit(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    res.samples_Q[r] = vals[r].Q;
    res.samples_F[r] = vals[r].F;
    res.samples_H[r] = vals[r].H;
    res.samples_X[r] = vals[r].X;
    res.samples_Y[r] = vals[r].Y;
    limit[r] = vals[r].X * noise[r];
    res.max_decomposition_residual = std::max(res.max_decomposition_residual, residual[r]);
  }
  res.moment_table = moment_checks(res);
  res.fm_X = fourth_moment_diag(res.samples_X, seed, bootstrap_resamples);
  res.fm_Y = fourth_moment_diag(res.samples_Y, seed, bootstrap_resamples);
  res.d1_to_limit = empirical_d1(res.samples_Q, limit);
  return res;
}

std::vector<StableProbe> default_stable_probes() {
  return {{"psi=0.5*1[0,n)", 0.5, 0.0, 1.0}, {"psi=1*1[0,n/2)", 1.0, 0.0, 0.5}, {"psi=2*1[n/2,n)", 2.0, 0.5, 1.0}};
}

std::vector<double> default_lambda_grid() { return {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}; }

StableTestReport stable_test(std::span<const Value> f_samples, std::span<const Value> mixture_samples,
                             std::span<const std::vector<double>> probe_weights,
                             std::span<const std::string> probe_labels, std::span<const double> lambda_grid) {
  if (f_samples.size() != mixture_samples.size()) throw Error("stable_test: sample counts differ");
  if (probe_weights.size() != probe_labels.size()) throw Error("stable_test: one label per probe required");
  const std::size_t d = f_samples.empty() ? 1 : static_cast<std::size_t>(f_samples.front().size());
  std::vector<Value> grid;
  for (double l : lambda_grid) grid.push_back(Value::Constant(static_cast<Eigen::Index>(d), l));
  StableTestReport rep;
  for (std::size_t p = 0; p < probe_weights.size(); ++p) {
    const std::vector<double>& g = probe_weights[p];
    if (g.size() != f_samples.size()) throw Error("stable_test: probe weights and samples differ in length");
    const double mean = pairwise_sum(g) / static_cast<double>(g.size());
    if (!(mean > 0.0)) throw Error("stable_test: probe weights must have a positive mean");
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = g[i] / mean;
    const CfComparison cmp = cf_comparison(f_samples, w, mixture_samples, w, grid);
    for (std::size_t j = 0; j < cmp.points.size(); ++j) {
      const CfPoint& pt = cmp.points[j];
      StableTestRow row{probe_labels[p], lambda_grid[j], pt.distance, pt.pooled_std_error};
      rep.max_distance = std::max(rep.max_distance, row.distance);
      rep.max_ratio = std::max(rep.max_ratio, row.ratio());
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

StableTestReport quadratic_stable_test(const QuadraticRunResult& result, std::span<const StableProbe> probes,
                                       std::span<const double> lambda_grid) {
  const std::size_t R = result.replicas;
  const double n = static_cast<double>(result.n);
  const IntensityMeasure window = IntensityMeasure::uniform(Box::interval(0.0, n), 1.0, {1});
  const PathwiseFunctional W = PathwiseFunctional::scalar(
      [n](const PointConfiguration& c) { return (static_cast<double>(c.size()) - n) / std::sqrt(n); }, "W");
  const MixtureSpec spec = MixtureSpec::gaussian(W);

  std::vector<Value> f_samples(R), mixture(R);
  std::vector<std::vector<double>> weights(probes.size(), std::vector<double>(R));
  parallel_for(R, [&](std::size_t r) {
    const PointConfiguration eta = as_configuration(sample_path(result.n, result.seed, r), window);
    f_samples[r] = Value::Constant(1, result.samples_Q[r]);
    mixture[r] = sample_mixture(spec, eta, result.seed, r);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const Region in = interval_region(probes[p].a * n, probes[p].b * n);
      weights[p][r] = std::exp(-probes[p].c / std::sqrt(n) * static_cast<double>(count(eta, in)));
    }
  });
  std::vector<std::string> labels;
  for (const StableProbe& p : probes) labels.push_back(p.label);
  StableTestReport rep = stable_test(f_samples, mixture, weights, labels, lambda_grid);
  rep.n = result.n;
  return rep;
}

QuadraticRemainders quadratic_remainders(std::size_t n, std::size_t replicas, std::uint64_t seed,
                                         std::size_t nodes) {
  if (replicas == 0 || nodes == 0) throw Error("quadratic_remainders: replicas and nodes must be positive");
  const double nn = static_cast<double>(n);
  const double h = nn / static_cast<double>(nodes);
  std::vector<double> r3(replicas), r4(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PoissonPath path = sample_path(n, seed, r);
    const double f0 = evaluate_path(path).F;
    double s3 = 0.0, s4 = 0.0;
    PoissonPath plus;
    plus.n = n;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double s = (static_cast<double>(i) + 0.5) * h;
      const auto pos = std::upper_bound(path.jumps.begin(), path.jumps.end(), s);
      plus.jumps.assign(path.jumps.begin(), pos);
      plus.jumps.push_back(s);
      plus.jumps.insert(plus.jumps.end(), pos, path.jumps.end());
      const double d = evaluate_path(plus).F - f0;
      const double count = static_cast<double>(pos - path.jumps.begin());
      const double u = (count - s) / std::sqrt(nn) * std::pow(s / nn, nn);
      s3 += h * std::abs(u) * d * d;
      s4 += h * d * d * d * d;
    }
    r3[r] = s3;
    r4[r] = s4;
  });
  return {estimate_mean(r3), estimate_mean(r4)};
}

}  // namespace poismix
