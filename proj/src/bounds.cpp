#include "poismix/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "poismix/parallel.hpp"
#include "poismix/stats.hpp"

namespace poismix {

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
const double kRegularization = std::cbrt(2.0) + std::pow(2.0, -2.0 / 3.0);

Eigen::MatrixXd as_square(const Value& v, Eigen::Index d) {
  if (v.size() != d * d) throw Error("bound: S must have dimension d*d");
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d);
}

}  // namespace

const BoundTerm* BoundReport::term(const std::string& name) const {
  for (const BoundTerm& t : terms) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

double d1_from_deltas(double delta1, double delta2) {
  return std::max(kRegularization * std::pow(delta1, 2.0 / 3.0) * std::cbrt(delta2), delta1 * delta2);
}

BoundReport d3_bound(const PathwiseFunctional& F, const RandomField& u, const PathwiseFunctional& S,
                     const IntensityMeasure& intensity, std::size_t replicas, std::uint64_t seed, BracketKind kind) {
  if (replicas == 0) throw Error("d3_bound: replicas must be positive");
  if (F.dim != u.dim) throw Error("d3_bound: F and u must have the same dimension");
  const auto d = static_cast<Eigen::Index>(F.dim);
  if (S.dim != F.dim * F.dim) throw Error("d3_bound: S must be a d x d matrix");
  if (kind == BracketKind::eta) throw Error("d3_bound: bracket kind must be nu or gamma");

  const RandomField DF = derivative_field(F);
  const RandomField DS_S{S.dim,
                         [S, d](const PointConfiguration& c, const Location& z) {
                           const Eigen::MatrixXd s0 = as_square(S(c), d);
                           const Eigen::MatrixXd ds = as_square(S(c.add_point(z)), d) - s0;
                           const Eigen::MatrixXd prod = ds * s0.transpose();
                           return Value(Eigen::Map<const Value>(prod.data(), prod.size()));
                         },
                         "(DS)S^T"};

  std::vector<double> t1(replicas), t2(replicas), t3(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    const Eigen::MatrixXd b = energy_bracket(u, DF, eta, intensity, kind).matrix;
    const Eigen::MatrixXd s = as_square(S(eta), d);
    t1[r] = 0.25 * (0.5 * (b + b.transpose()) - s * s.transpose()).norm();
    t2[r] = energy_bracket(u, DS_S, eta, intensity, kind).matrix.norm() / 3.0;
    const Value f0 = F(eta), s0 = S(eta);
    t3[r] = intensity.integrate([&](const Location& z) {
              const PointConfiguration plus = eta.add_point(z);
              return u(eta, z).norm() * ((F(plus) - f0).squaredNorm() + (S(plus) - s0).squaredNorm());
            }) /
            6.0;
    if (!std::isfinite(t1[r])) throw NumericError("d3_bound: term bracket_minus_SST is not finite");
    if (!std::isfinite(t2[r])) throw NumericError("d3_bound: term bracket_DS_S is not finite");
    if (!std::isfinite(t3[r])) throw NumericError("d3_bound: term remainder is not finite");
  });

  BoundReport rep;
  rep.replicas = replicas;
  rep.seed = seed;
  const Estimate e1 = estimate_mean(t1), e2 = estimate_mean(t2), e3 = estimate_mean(t3);
  rep.terms = {{"bracket_minus_SST", e1.mean, e1.std_error},
               {"bracket_DS_S", e2.mean, e2.std_error},
               {"remainder", e3.mean, e3.std_error}};
  std::vector<double> total(replicas);
  for (std::size_t r = 0; r < replicas; ++r) total[r] = t1[r] + t2[r] + t3[r];
  const Estimate et = estimate_mean(total);
  rep.d3_bound = et.mean;
  rep.terms.push_back({"d3_bound", et.mean, et.std_error});
  return rep;
}

BoundReport d1_bound(const PathwiseFunctional& F, const RandomField& u, const PathwiseFunctional& S,
                     const IntensityMeasure& intensity, std::size_t replicas, std::uint64_t seed) {
  if (F.dim != 1 || u.dim != 1 || S.dim != 1) throw Error("d1_bound: univariate F, u and S required");
  if (replicas == 0) throw Error("d1_bound: replicas must be positive");

  struct Row {
    double abs_s, abs_f, bracket_gap, s_nu_uds, remainder;
  };
  std::vector<Row> rows(replicas);
  std::vector<double> f_values(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    const double f0 = F(eta)[0], s0 = S(eta)[0];
    f_values[r] = f0;
    double nu_udf = 0.0, nu_uds = 0.0, rem = 0.0;
    for (const WeightedNode& n : intensity.nodes()) {
      if (n.weight == 0.0) continue;
      const PointConfiguration plus = eta.add_point(n.location);
      const double uz = u(eta, n.location)[0];
      const double df = F(plus)[0] - f0, ds = S(plus)[0] - s0;
      const double w = n.weight;
      nu_udf += w * uz * df;
      nu_uds += w * uz * ds;
      rem += w * std::abs(uz) * (df * df + ds * ds);
    }
    if (!std::isfinite(f0)) throw NumericError("d1_bound: term E|F| is not finite");
    if (!std::isfinite(s0)) throw NumericError("d1_bound: term E|S| is not finite");
    if (!std::isfinite(nu_udf)) throw NumericError("d1_bound: term E|nu(uDF)-S^2| is not finite");
    if (!std::isfinite(nu_uds)) throw NumericError("d1_bound: term E|S nu(uDS)| is not finite");
    if (!std::isfinite(rem)) throw NumericError("d1_bound: term E nu(|u|(|DF|^2+|DS|^2)) is not finite");
    rows[r] = {std::abs(s0), std::abs(f0), std::abs(nu_udf - s0 * s0), std::abs(s0 * nu_uds), rem};
  });

  std::vector<double> col(replicas), d1s(replicas), d2s(replicas);
  auto column = [&](double Row::*field) {
    for (std::size_t r = 0; r < replicas; ++r) col[r] = rows[r].*field;
    return estimate_mean(col);
  };
  const Estimate abs_s = column(&Row::abs_s), abs_f = column(&Row::abs_f), gap = column(&Row::bracket_gap),
                 suds = column(&Row::s_nu_uds), rem = column(&Row::remainder);
  for (std::size_t r = 0; r < replicas; ++r) {
    d1s[r] = kSqrt2OverPi * (2.0 + rows[r].abs_s) + rows[r].abs_f;
    d2s[r] = 0.25 * kSqrt2OverPi * rows[r].bracket_gap +
             std::sqrt(2.0) * (rows[r].s_nu_uds / 3.0 + rows[r].remainder / 6.0);
  }
  const Estimate delta1 = estimate_mean(d1s), delta2 = estimate_mean(d2s);

  BoundReport rep;
  rep.replicas = replicas;
  rep.seed = seed;
  rep.delta1 = delta1.mean;
  rep.delta2 = delta2.mean;
  rep.delta1_std_error = delta1.std_error;
  rep.delta2_std_error = delta2.std_error;
  rep.f_samples = std::move(f_values);
  rep.d1_bound = d1_from_deltas(rep.delta1, rep.delta2);
  // Delta method on whichever branch of the max is active.
  const double a = rep.delta1, b = rep.delta2;
  double da, db;
  if (kRegularization * std::pow(a, 2.0 / 3.0) * std::cbrt(b) >= a * b) {
    da = a > 0.0 ? (2.0 / 3.0) * kRegularization * std::pow(a, -1.0 / 3.0) * std::cbrt(b) : 0.0;
    db = b > 0.0 ? (1.0 / 3.0) * kRegularization * std::pow(a, 2.0 / 3.0) * std::pow(b, -2.0 / 3.0) : 0.0;
  } else {
    da = b;
    db = a;
  }
  rep.d1_std_error = std::hypot(da * rep.delta1_std_error, db * rep.delta2_std_error);
  rep.terms = {{"E|S|", abs_s.mean, abs_s.std_error},
               {"E|F|", abs_f.mean, abs_f.std_error},
               {"E|nu(uDF)-S^2|", gap.mean, gap.std_error},
               {"E|S nu(uDS)|", suds.mean, suds.std_error},
               {"E nu(|u|(|DF|^2+|DS|^2))", rem.mean, rem.std_error},
               {"delta1", rep.delta1, rep.delta1_std_error},
               {"delta2", rep.delta2, rep.delta2_std_error},
               {"d1_bound", rep.d1_bound, rep.d1_std_error}};
  return rep;
}

BoundReport d1_bound_sequence(const BoundReport& within, std::span<const double> sn_samples,
                              std::span<const double> s_samples) {
  BoundReport rep = within;
  const double extra = kSqrt2OverPi * empirical_d1(sn_samples, s_samples);
  rep.d1_bound = within.d1_bound + extra;
  rep.terms.push_back({"sqrt(2/pi) d1(S_n,S)", extra, 0.0});
  rep.terms.push_back({"d1_bound_sequence", rep.d1_bound, within.d1_std_error});
  return rep;
}

double empirical_d1(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("empirical_d1: sample counts differ");
  if (a.empty()) return 0.0;
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = std::abs(x[i] - y[i]);
  return pairwise_sum(diff) / static_cast<double>(diff.size());
}

namespace {

struct WeightedCf {
  std::complex<double> mean;
  double variance = 0.0;
};

WeightedCf weighted_cf(std::span<const Value> samples, std::span<const double> weights, const Value& lambda) {
  const std::size_t n = samples.size();
  if (!weights.empty() && weights.size() != n) throw Error("cf_distance: weights and samples differ in length");
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() != lambda.size()) throw Error("cf_distance: lambda has the wrong dimension");
    const double w = weights.empty() ? 1.0 : weights[i];
    const double phase = lambda.dot(samples[i]);
    re[i] = w * std::cos(phase);
    im[i] = w * std::sin(phase);
  }
  const Estimate er = estimate_mean(re), ei = estimate_mean(im);
  const double nn = static_cast<double>(n);
  return {{er.mean, ei.mean}, nn * (er.std_error * er.std_error + ei.std_error * ei.std_error)};
}

}  // namespace

CfComparison cf_comparison(std::span<const Value> samples_a, std::span<const double> weights_a,
                           std::span<const Value> samples_b, std::span<const double> weights_b,
                           std::span<const Value> lambda_grid) {
  if (samples_a.empty() || samples_b.empty()) throw Error("cf_distance: empty sample set");
  CfComparison out;
  for (const Value& lambda : lambda_grid) {
    const WeightedCf a = weighted_cf(samples_a, weights_a, lambda);
    const WeightedCf b = weighted_cf(samples_b, weights_b, lambda);
    CfPoint p;
    p.lambda = lambda;
    p.cf_a = a.mean;
    p.cf_b = b.mean;
    p.distance = std::abs(a.mean - b.mean);
    p.pooled_std_error = std::sqrt(a.variance / static_cast<double>(samples_a.size()) +
                                   b.variance / static_cast<double>(samples_b.size()));
    out.distance = std::max(out.distance, p.distance);
    out.max_ratio = std::max(out.max_ratio, p.ratio());
    out.points.push_back(std::move(p));
  }
  return out;
}

double cf_distance(std::span<const Value> samples_a, std::span<const double> weights_a,
                   std::span<const Value> samples_b, std::span<const double> weights_b,
                   std::span<const Value> lambda_grid) {
  return cf_comparison(samples_a, weights_a, samples_b, weights_b, lambda_grid).distance;
}

}  // namespace poismix
