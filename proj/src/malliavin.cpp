#include "poismix/malliavin.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <vector>

#include "poismix/parallel.hpp"

namespace poismix {

Value divergence(const RandomField& u, const PointConfiguration& config, const IntensityMeasure& intensity) {
  Value acc = Value::Zero(static_cast<Eigen::Index>(u.dim));
  for (std::size_t i = 0; i < config.size(); ++i) acc += u(config.drop_index(i), config[i]);
  for (const WeightedNode& n : intensity.nodes()) {
    if (n.weight == 0.0) continue;
    const Value v = u(config, n.location);
    if (!v.allFinite()) throw NumericError("divergence: field '" + u.label + "' is not finite at a node");
    acc -= n.weight * v;
  }
  return acc;
}

namespace {

ChaosFunctional rescale(const ChaosFunctional& F, const std::function<double(std::size_t)>& factor) {
  ChaosFunctional out;
  for (const Kernel& h : F.terms()) {
    if (h.order == 0 && factor(0) == 0.0) continue;
    out.add(h.scaled(factor(h.order)));
  }
  return out;
}

}  // namespace

ChaosFunctional ou_generator(const ChaosFunctional& F) {
  return rescale(F, [](std::size_t q) { return -static_cast<double>(q); });
}

ChaosFunctional pseudo_inverse(const ChaosFunctional& F) {
  if (F.mean() != 0.0) throw Error("pseudo_inverse: the order-0 term must vanish");
  return rescale(F, [](std::size_t q) { return q == 0 ? 0.0 : -1.0 / static_cast<double>(q); });
}

RandomField canonical_field(const ChaosFunctional& F, const IntensityMeasure& intensity) {
  std::vector<Kernel> terms;
  for (const Kernel& h : F.terms()) {
    if (h.order > 0) terms.push_back(symmetrize(h));
  }
  const IntensityMeasure* nu = &intensity;
  return RandomField::scalar(
      [terms = std::move(terms), nu](const PointConfiguration& c, const Location& z) {
        double s = 0.0;
        for (const Kernel& h : terms) {
          Kernel section{h.order - 1,
                         [&h, &z](std::span<const Location> x) {
                           std::array<Location, kMaxIntegralOrder + 1> args;
                           args[0] = z;
                           for (std::size_t i = 0; i < x.size(); ++i) args[i + 1] = x[i];
                           return h(std::span<const Location>(args.data(), x.size() + 1));
                         },
                         true, "section"};
          s += eval_multiple_integral(section, c, *nu);
        }
        return s;
      },
      "-DL^-1F");
}

Estimate dirichlet_energy(const PathwiseFunctional& F, const PathwiseFunctional& G,
                          const IntensityMeasure& intensity, std::size_t replicas, std::uint64_t seed) {
  if (replicas == 0) throw Error("dirichlet_energy: replicas must be positive");
  std::vector<double> samples(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    const Value f0 = F(eta), g0 = G(eta);
    samples[r] = intensity.integrate([&](const Location& z) {
      const PointConfiguration plus = eta.add_point(z);
      return (F(plus) - f0).dot(G(plus) - g0);
    });
  });
  return estimate_mean(samples);
}

double carre_du_champ(const PathwiseFunctional& F, const PointConfiguration& config,
                      const IntensityMeasure& intensity) {
  return carre_du_champ(F, F, config, intensity);
}

double carre_du_champ(const PathwiseFunctional& F, const PathwiseFunctional& G, const PointConfiguration& config,
                      const IntensityMeasure& intensity) {
  const Value f0 = F(config), g0 = G(config);
  const double nu_part = intensity.integrate([&](const Location& z) {
    const PointConfiguration plus = config.add_point(z);
    return (F(plus) - f0).dot(G(plus) - g0);
  });
  double eta_part = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const PointConfiguration minus = config.drop_index(i);
    eta_part += (f0 - F(minus)).dot(g0 - G(minus));
  }
  return 0.5 * nu_part + 0.5 * eta_part;
}

const char* to_string(BracketKind kind) {
  switch (kind) {
    case BracketKind::gamma: return "gamma";
    case BracketKind::nu: return "nu";
    case BracketKind::eta: return "eta";
  }
  return "?";
}

EnergyBracketResult energy_bracket(const RandomField& u, const RandomField& v, const PointConfiguration& config,
                                   const IntensityMeasure& intensity, BracketKind kind) {
  const auto du = static_cast<Eigen::Index>(u.dim), dv = static_cast<Eigen::Index>(v.dim);
  Eigen::MatrixXd nu_part = Eigen::MatrixXd::Zero(du, dv);
  Eigen::MatrixXd eta_part = Eigen::MatrixXd::Zero(du, dv);
  if (kind != BracketKind::eta) {
    for (const WeightedNode& n : intensity.nodes()) {
      if (n.weight == 0.0) continue;
      const Value a = u(config, n.location), b = v(config, n.location);
      if (!a.allFinite() || !b.allFinite()) throw NumericError("energy_bracket: field is not finite at a node");
      nu_part += n.weight * a * b.transpose();
    }
  }
  if (kind != BracketKind::nu) {
    for (std::size_t i = 0; i < config.size(); ++i) {
      const PointConfiguration minus = config.drop_index(i);
      eta_part += u(minus, config[i]) * v(minus, config[i]).transpose();
    }
  }
  EnergyBracketResult out;
  out.kind = kind;
  switch (kind) {
    case BracketKind::nu: out.matrix = nu_part; break;
    case BracketKind::eta: out.matrix = eta_part; break;
    case BracketKind::gamma: out.matrix = 0.5 * nu_part + 0.5 * eta_part; break;
  }
  return out;
}

PairedComparison ibp_check(const PathwiseFunctional& F, const RandomField& u, const IntensityMeasure& intensity,
                           std::size_t replicas, std::uint64_t seed) {
  if (F.dim != u.dim) throw Error("ibp_check: F and u must have the same dimension");
  if (replicas == 0) throw Error("ibp_check: replicas must be positive");
  std::vector<double> lhs(replicas), rhs(replicas);
  const RandomField DF = derivative_field(F);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    lhs[r] = F(eta).dot(divergence(u, eta, intensity));
    rhs[r] = energy_bracket(u, DF, eta, intensity, BracketKind::nu).matrix.trace();
  });
  return compare_paired(lhs, rhs);
}

PairedComparison skorokhod_check(const RandomField& u, const IntensityMeasure& intensity, std::size_t replicas,
                                 std::uint64_t seed) {
  if (u.dim != 1) throw Error("skorokhod_check: scalar field required");
  if (replicas == 0) throw Error("skorokhod_check: replicas must be positive");
  std::vector<double> lhs(replicas), rhs(replicas);
  const auto nodes = intensity.nodes();
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    const double d = divergence(u, eta, intensity)[0];
    lhs[r] = d * d;
    // u(η, z_j) and u(η + δ_{z_i}, z_j) on the node grid.
    const std::size_t m = nodes.size();
    std::vector<double> base(m);
    for (std::size_t j = 0; j < m; ++j) base[j] = u(eta, nodes[j].location)[0];
    std::vector<double> plus(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      const PointConfiguration added = eta.add_point(nodes[i].location);
      for (std::size_t j = 0; j < m; ++j) plus[i * m + j] = u(added, nodes[j].location)[0] - base[j];
    }
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += nodes[j].weight * base[j] * base[j];
    double cross = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j)
        cross += nodes[i].weight * nodes[j].weight * plus[i * m + j] * plus[j * m + i];
    }
    rhs[r] = s + cross;
  });
  return compare_paired(lhs, rhs);
}

PairedComparison chain_rule_multiplication_check(const PathwiseFunctional& F, const PathwiseFunctional& G,
                                                 const RandomField& u, const IntensityMeasure& intensity,
                                                 std::size_t replicas, std::uint64_t seed) {
  if (F.dim != 1 || G.dim != 1 || u.dim != 1) throw Error("chain_rule_multiplication_check: scalar inputs required");
  if (replicas == 0) throw Error("chain_rule_multiplication_check: replicas must be positive");
  const PathwiseFunctional FG = PathwiseFunctional::scalar(
      [F, G](const PointConfiguration& c) { return F(c)[0] * G(c)[0]; }, F.label + "*" + G.label);
  const RandomField DFG = derivative_field(FG), DF = derivative_field(F), DG = derivative_field(G);
  std::vector<double> lhs(replicas), rhs(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    lhs[r] = energy_bracket(DFG, u, eta, intensity, BracketKind::gamma).matrix(0, 0);
    rhs[r] = F(eta)[0] * energy_bracket(DG, u, eta, intensity, BracketKind::gamma).matrix(0, 0) +
             G(eta)[0] * energy_bracket(DF, u, eta, intensity, BracketKind::gamma).matrix(0, 0);
  });
  return compare_paired(lhs, rhs);
}

double chain_rule_remainder(const std::function<double(double)>& phi2, double x, double h) {
  using boost::math::quadrature::gauss;
  return gauss<double, 10>::integrate(
      [&](double alpha) {
        return alpha * gauss<double, 10>::integrate(
                           [&](double beta) { return phi2(x + alpha + alpha * beta * (h - 1.0)); }, 0.0, 1.0);
      },
      0.0, 1.0);
}

ChainRuleDifference chain_rule_difference(const std::function<double(double)>& phi,
                                          const std::function<double(double)>& phi2, const PathwiseFunctional& F,
                                          const PointConfiguration& config, const Location& z) {
  if (F.dim != 1) throw Error("chain_rule_difference: scalar functional required");
  const double f0 = F(config)[0];
  const double f1 = F(config.add_point(z))[0];
  const double h = f1 - f0;
  ChainRuleDifference out;
  out.lhs = phi(f1) - phi(f0);
  out.rhs = h * (phi(f0 + 1.0) - phi(f0)) + h * (h - 1.0) * chain_rule_remainder(phi2, f0, h);
  return out;
}

}  // namespace poismix
