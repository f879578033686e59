#include "poismix/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "poismix/parallel.hpp"

namespace poismix {

namespace {

constexpr std::pair<ConditionTag, const char*> kTagNames[] = {
    {ConditionTag::R3, "R3"},         {ConditionTag::R4, "R4"},       {ConditionTag::P3, "P3"},
    {ConditionTag::P4, "P4"},         {ConditionTag::S_nu, "S_nu"},   {ConditionTag::S_gamma, "S_gamma"},
    {ConditionTag::W_nu, "W_nu"},     {ConditionTag::W_gamma, "W_gamma"}, {ConditionTag::M_nu, "M_nu"},
};

constexpr std::pair<KernelConditionTag, const char*> kKernelTagNames[] = {
    {KernelConditionTag::KS, "KS"},         {KernelConditionTag::KR4, "KR4"}, {KernelConditionTag::KRstar, "KRstar"},
    {KernelConditionTag::KW, "KW"},         {KernelConditionTag::KP4, "KP4"},
};

struct ReplicaValue {
  Eigen::MatrixXd value;
  double distance = 0.0;
};

Eigen::MatrixXd outer_target(const PathwiseFunctional& S, const PointConfiguration& eta, Eigen::Index d) {
  const Value s = S(eta);
  if (s.size() != d * d) throw Error("condition target must have dimension d*d");
  const Eigen::Map<const Eigen::MatrixXd> m(s.data(), d, d);
  return m * m.transpose();
}

ReplicaValue evaluate_replica(ConditionTag tag, const PathwiseFunctional& F, const RandomField& u,
                              const RandomField& DF, const ConditionAux& aux, const IntensityMeasure& intensity,
                              const PointConfiguration& eta) {
  ReplicaValue out;
  auto integrand = [&](auto&& fn) {
    const Value f0 = F(eta);
    return Eigen::MatrixXd::Constant(1, 1, intensity.integrate([&](const Location& z) {
      return fn(u(eta, z), (F(eta.add_point(z)) - f0).eval());
    }));
  };
  switch (tag) {
    case ConditionTag::R3:
      out.value = integrand([](const Value& uz, const Value& dz) { return uz.norm() * dz.squaredNorm(); });
      break;
    case ConditionTag::R4:
      out.value = integrand([](const Value&, const Value& dz) { return std::pow(dz.squaredNorm(), 2); });
      break;
    case ConditionTag::P3:
      out.value = integrand([](const Value& uz, const Value& dz) {
        return std::abs(uz[0] * dz[0] * (dz[0] - 1.0));
      });
      break;
    case ConditionTag::P4:
      out.value = integrand([](const Value&, const Value& dz) {
        return dz[0] * dz[0] * (dz[0] - 1.0) * (dz[0] - 1.0);
      });
      break;
    case ConditionTag::S_nu:
    case ConditionTag::S_gamma: {
      const BracketKind kind = tag == ConditionTag::S_nu ? BracketKind::nu : BracketKind::gamma;
      out.value = energy_bracket(u, DF, eta, intensity, kind).matrix;
      if (aux.target) out.distance = (out.value - outer_target(*aux.target, eta, out.value.rows())).norm();
      break;
    }
    case ConditionTag::M_nu: {
      out.value = Eigen::MatrixXd::Constant(1, 1, energy_bracket(u, DF, eta, intensity, BracketKind::nu).matrix.trace());
      if (aux.target) out.distance = std::abs(out.value(0, 0) - (*aux.target)(eta)[0]);
      break;
    }
    case ConditionTag::W_nu:
      out.value = energy_bracket(u, *aux.h, eta, intensity, BracketKind::nu).matrix;
      out.distance = out.value.norm();
      break;
    case ConditionTag::W_gamma:
      out.value = energy_bracket(u, derivative_field(*aux.G), eta, intensity, BracketKind::gamma).matrix;
      out.distance = out.value.norm();
      break;
  }
  return out;
}

}  // namespace

const char* to_string(ConditionTag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "?";
}

ConditionTag parse_condition_tag(const std::string& name) {
  for (const auto& [t, n] : kTagNames) {
    if (name == n) return t;
  }
  throw Error("unknown condition tag '" + name + "'");
}

const char* to_string(KernelConditionTag tag) {
  for (const auto& [t, name] : kKernelTagNames) {
    if (t == tag) return name;
  }
  return "?";
}

KernelConditionTag parse_kernel_condition_tag(const std::string& name) {
  for (const auto& [t, n] : kKernelTagNames) {
    if (name == n) return t;
  }
  throw Error("unknown kernel condition tag '" + name + "'");
}

ConditionEstimate estimate_condition(ConditionTag tag, const PathwiseFunctional& F, const RandomField& u,
                                     const ConditionAux& aux, const IntensityMeasure& intensity,
                                     std::size_t replicas, std::uint64_t seed, std::size_t n_index) {
  if (replicas == 0) throw Error("estimate_condition: replicas must be positive");
  if (tag == ConditionTag::W_nu && !aux.h) throw Error("W_nu requires a probe field h");
  if (tag == ConditionTag::W_gamma && !aux.G) throw Error("W_gamma requires a probe functional G");
  const bool scalar_tag = tag == ConditionTag::P3 || tag == ConditionTag::P4 || tag == ConditionTag::M_nu;
  if (scalar_tag && (F.dim != 1 || u.dim != 1)) throw Error(std::string(to_string(tag)) + " requires scalar F and u");

  const RandomField DF = derivative_field(F);
  std::vector<ReplicaValue> values(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    values[r] = evaluate_replica(tag, F, u, DF, aux, intensity, eta);
  });

  ConditionEstimate est;
  est.tag = tag;
  est.n_index = n_index;
  const Eigen::Index rows = values.front().value.rows(), cols = values.front().value.cols();
  est.value.resize(rows, cols);
  std::vector<double> column(replicas);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (std::size_t r = 0; r < replicas; ++r) column[r] = values[r].value(i, j);
      const Estimate e = estimate_mean(column);
      est.value(i, j) = e.mean;
      est.std_error = std::max(est.std_error, e.std_error);
    }
  }
  const bool has_distance = tag == ConditionTag::W_nu || tag == ConditionTag::W_gamma ||
                            ((tag == ConditionTag::S_nu || tag == ConditionTag::S_gamma || tag == ConditionTag::M_nu) &&
                             aux.target.has_value());
  if (has_distance) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = values[r].distance;
    est.l1_distance = estimate_mean(column);
  }
  if (aux.keep_samples) {
    est.samples.resize(replicas);
    for (std::size_t r = 0; r < replicas; ++r) est.samples[r] = values[r].value.norm();
  }
  return est;
}

namespace {

double legendre(int k, double t) {
  switch (k) {
    case 0: return 1.0;
    case 1: return t;
    case 2: return 0.5 * (3.0 * t * t - 1.0);
    default: return 0.5 * (5.0 * t * t * t - 3.0 * t);
  }
}

struct DyadicInterval {
  double a, b;
  std::string name;
};

std::vector<DyadicInterval> dyadic_intervals(const IntensityMeasure& intensity) {
  const double lo = intensity.window().lo[0], hi = intensity.window().hi[0];
  std::vector<DyadicInterval> out;
  for (int level = 0; level <= 2; ++level) {
    const int parts = 1 << level;
    for (int k = 0; k < parts; ++k) {
      const double a = lo + (hi - lo) * k / parts;
      // The last interval is closed so that the right window edge is covered.
      const double b = k + 1 == parts ? std::nextafter(hi, INFINITY) : lo + (hi - lo) * (k + 1) / parts;
      out.push_back({a, b, "dyadic_" + std::to_string(level) + "_" + std::to_string(k)});
    }
  }
  return out;
}

}  // namespace

std::vector<RandomField> probe_fields(const IntensityMeasure& intensity) {
  std::vector<RandomField> out;
  for (const DyadicInterval& I : dyadic_intervals(intensity)) {
    const Region in = interval_region(I.a, I.b);
    out.push_back(RandomField::deterministic([in](const Location& z) { return in(z) ? 1.0 : 0.0; }, I.name));
  }
  const double lo = intensity.window().lo[0], hi = intensity.window().hi[0];
  for (int k = 0; k <= 3; ++k) {
    out.push_back(RandomField::deterministic(
        [k, lo, hi](const Location& z) { return legendre(k, 2.0 * (z[0] - lo) / (hi - lo) - 1.0); },
        "legendre_" + std::to_string(k)));
  }
  return out;
}

std::vector<PathwiseFunctional> probe_functionals(const IntensityMeasure& intensity) {
  std::vector<PathwiseFunctional> out;
  for (double c : {0.5, 1.0, 2.0}) {
    for (const DyadicInterval& I : dyadic_intervals(intensity)) {
      const Region in = interval_region(I.a, I.b);
      out.push_back(PathwiseFunctional::scalar(
          [in, c](const PointConfiguration& eta) { return std::exp(-c * static_cast<double>(count(eta, in))); },
          "exp(-" + std::to_string(c).substr(0, 3) + "*" + I.name + ")"));
    }
  }
  return out;
}

std::vector<ConditionEstimate> estimate_probes(ConditionTag tag, const PathwiseFunctional& F, const RandomField& u,
                                               const IntensityMeasure& intensity, std::size_t replicas,
                                               std::uint64_t seed, std::size_t n_index) {
  std::vector<ConditionEstimate> out;
  if (tag == ConditionTag::W_nu) {
    for (const RandomField& h : probe_fields(intensity)) {
      ConditionAux aux;
      aux.h = h;
      out.push_back(estimate_condition(tag, F, u, aux, intensity, replicas, seed, n_index));
      out.back().probe = h.label;
    }
  } else if (tag == ConditionTag::W_gamma) {
    for (const PathwiseFunctional& G : probe_functionals(intensity)) {
      ConditionAux aux;
      aux.G = G;
      out.push_back(estimate_condition(tag, F, u, aux, intensity, replicas, seed, n_index));
      out.back().probe = G.label;
    }
  } else {
    throw Error("estimate_probes: only W_nu and W_gamma use probe sets");
  }
  return out;
}

void check_symmetrization(const Kernel& g, const Kernel& g_hat, const IntensityMeasure& intensity,
                          std::size_t tuples, std::uint64_t seed) {
  if (g.order != g_hat.order) throw Error("symmetrization check: kernel orders differ");
  if (intensity.total_mass() <= 0.0) return;
  const Kernel sym = symmetrize(g_hat);
  std::vector<Location> args(g.order);
  for (std::size_t t = 0; t < tuples; ++t) {
    Rng rng = make_stream(seed, t, StreamTag::auxiliary);
    for (Location& x : args) x = intensity.sample_location(rng);
    const double a = g(args), b = sym(args);
    if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
      throw Error("kernel condition: g_hat does not symmetrize to g");
  }
}

KernelConditionResult kernel_condition(KernelConditionTag tag, const Kernel& g, const Kernel& g_hat, const Kernel& h,
                                       const IntensityMeasure& intensity) {
  if (g.order != 2 || g_hat.order != 2) throw Error("kernel condition: g and g_hat must have order 2");
  if (h.order != 1) throw Error("kernel condition: h must have order 1");
  check_symmetrization(g, g_hat, intensity);
  KernelConditionResult out;
  out.tag = tag;
  auto l2_norm_1 = [&](const Kernel& k) {
    return std::sqrt(integrate_power(intensity, 1, [&](std::span<const Location> x) {
      const double v = k(x);
      return v * v;
    }));
  };
  switch (tag) {
    case KernelConditionTag::KS:
      out.value = integrate_power(intensity, 2, [&](std::span<const Location> x) { return g(x) * g_hat(x); });
      out.kernel = star_contraction(g, g_hat, 1, 1, intensity);
      break;
    case KernelConditionTag::KR4:
      out.value = std::pow(integrate_power(intensity, 2, [&](std::span<const Location> x) { return std::pow(g(x), 4); }),
                           0.25);
      break;
    case KernelConditionTag::KRstar:
      out.value = l2_norm_1(star_contraction(g, g, 2, 1, intensity));
      break;
    case KernelConditionTag::KW:
      out.value = l2_norm_1(star_contraction(g_hat, h, 1, 1, intensity));
      break;
    case KernelConditionTag::KP4:
      out.value = integrate_power(intensity, 2, [&](std::span<const Location> x) {
        const double v = g(x);
        return v * v * (v - 0.5) * (v - 0.5);
      });
      break;
  }
  return out;
}

}  // namespace poismix
