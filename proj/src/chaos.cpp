#include "poismix/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poismix/parallel.hpp"

namespace poismix {

namespace {

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

void integrate_rec(std::span<const WeightedNode> nodes, std::size_t k, std::vector<Location>& args,
                   const std::function<double(std::span<const Location>)>& fn, double& acc,
                   double weight) {
  if (args.size() == k) {
    const double v = fn(args);
    if (!std::isfinite(v)) throw NumericError("quadrature: integrand is not finite at a node");
    acc += weight * v;
    return;
  }
  for (const WeightedNode& n : nodes) {
    if (n.weight == 0.0) continue;
    args.push_back(n.location);
    integrate_rec(nodes, k, args, fn, acc, weight * n.weight);
    args.pop_back();
  }
}

// Σ over η^{(|J|)} of ∫ f dν^{q−|J|}, with the η-variables placed at the
// positions set in `mask`.
double mixed_term(const Kernel& f, const PointConfiguration& config, const IntensityMeasure& intensity,
                  unsigned mask) {
  const std::size_t q = f.order;
  std::vector<std::size_t> eta_pos, nu_pos;
  for (std::size_t i = 0; i < q; ++i) ((mask >> i) & 1u ? eta_pos : nu_pos).push_back(i);
  std::vector<Location> args(q);
  double total = 0.0;
  for_each_factorial_tuple(config, eta_pos.size(), [&](std::span<const Location> tuple) {
    for (std::size_t i = 0; i < eta_pos.size(); ++i) args[eta_pos[i]] = tuple[i];
    total += integrate_power(intensity, nu_pos.size(), [&](std::span<const Location> ys) {
      for (std::size_t i = 0; i < nu_pos.size(); ++i) args[nu_pos[i]] = ys[i];
      return f(args);
    });
  });
  return total;
}

// The J-term of the alternating sum, grouped by |J| when f is symmetric.
double alternating_sum(const Kernel& f, const PointConfiguration& config, const IntensityMeasure& intensity,
                       bool include_empty) {
  const std::size_t q = f.order;
  double total = 0.0;
  if (f.symmetric) {
    for (std::size_t s = include_empty ? 0 : 1; s <= q; ++s) {
      if (s > config.size()) break;
      const unsigned mask = (1u << s) - 1u;
      const double sign = (q - s) % 2 == 0 ? 1.0 : -1.0;
      total += sign * binomial(q, s) * mixed_term(f, config, intensity, mask);
    }
    return total;
  }
  for (unsigned mask = include_empty ? 0u : 1u; mask < (1u << q); ++mask) {
    const std::size_t s = static_cast<std::size_t>(std::popcount(mask));
    if (s > config.size()) continue;
    const double sign = (q - s) % 2 == 0 ? 1.0 : -1.0;
    total += sign * mixed_term(f, config, intensity, mask);
  }
  return total;
}

void check_integral_order(const Kernel& f) {
  if (f.order > kMaxIntegralOrder)
    throw Error("multiple integral: order " + std::to_string(f.order) + " is not supported (max 3)");
  if (!f.eval) throw Error("multiple integral: empty kernel");
}

}  // namespace

double Kernel::operator()(std::span<const Location> args) const {
  if (args.size() != order) throw Error("kernel '" + label + "': wrong number of arguments");
  return eval(args);
}

Kernel Kernel::constant(double c) {
  return {0, [c](std::span<const Location>) { return c; }, true, "constant"};
}

Kernel Kernel::tensor(std::vector<std::function<double(const Location&)>> factors, std::string label) {
  const std::size_t q = factors.size();
  return {q,
          [factors = std::move(factors)](std::span<const Location> x) {
            double v = 1.0;
            for (std::size_t i = 0; i < factors.size(); ++i) v *= factors[i](x[i]);
            return v;
          },
          q <= 1, std::move(label)};
}

Kernel Kernel::indicator(std::vector<Region> regions, std::string label) {
  std::vector<std::function<double(const Location&)>> factors;
  for (Region& r : regions) factors.push_back([r = std::move(r)](const Location& z) { return r(z) ? 1.0 : 0.0; });
  return tensor(std::move(factors), std::move(label));
}

Kernel Kernel::scaled(double c) const {
  Kernel k = *this;
  k.eval = [f = eval, c](std::span<const Location> x) { return c * f(x); };
  return k;
}

Kernel operator+(const Kernel& f, const Kernel& g) {
  if (f.order != g.order) throw Error("kernel sum: orders differ");
  return {f.order, [a = f.eval, b = g.eval](std::span<const Location> x) { return a(x) + b(x); },
          f.symmetric && g.symmetric, f.label + "+" + g.label};
}

double integrate_power(const IntensityMeasure& intensity, std::size_t k,
                       const std::function<double(std::span<const Location>)>& fn) {
  std::vector<Location> args;
  args.reserve(k);
  double acc = 0.0;
  integrate_rec(intensity.nodes(), k, args, fn, acc, 1.0);
  return acc;
}

double inner_product(const Kernel& f, const Kernel& g, const IntensityMeasure& intensity) {
  if (f.order != g.order) throw Error("inner_product: orders differ");
  return integrate_power(intensity, f.order, [&](std::span<const Location> x) { return f(x) * g(x); });
}

Kernel symmetrize(const Kernel& f) {
  const std::size_t q = f.order;
  if (q > kMaxSymmetrizeOrder) throw Error("symmetrize: order " + std::to_string(q) + " is not supported (max 4)");
  if (q <= 1 || f.symmetric) {
    Kernel k = f;
    k.symmetric = true;
    return k;
  }
  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> p(q);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const double scale = 1.0 / static_cast<double>(perms.size());
  return {q,
          [g = f.eval, perms = std::move(perms), scale, q](std::span<const Location> x) {
            std::array<Location, kMaxSymmetrizeOrder> y;
            double s = 0.0;
            for (const auto& perm : perms) {
              for (std::size_t i = 0; i < q; ++i) y[i] = x[perm[i]];
              s += g(std::span<const Location>(y.data(), q));
            }
            return s * scale;
          },
          true, "sym(" + f.label + ")"};
}

double symmetry_defect(const Kernel& f, std::span<const std::vector<Location>> tuples) {
  double defect = 0.0;
  for (const auto& t : tuples) {
    if (t.size() != f.order) throw Error("symmetry_defect: tuple length differs from kernel order");
    const double base = f(t);
    std::vector<std::size_t> p(t.size());
    std::iota(p.begin(), p.end(), 0);
    std::vector<Location> y(t.size());
    while (std::next_permutation(p.begin(), p.end())) {
      for (std::size_t i = 0; i < t.size(); ++i) y[i] = t[p[i]];
      defect = std::max(defect, std::abs(f(y) - base));
    }
  }
  return defect;
}

double eval_multiple_integral(const Kernel& f, const PointConfiguration& config,
                              const IntensityMeasure& intensity) {
  check_integral_order(f);
  if (f.order == 0) return f(std::span<const Location>{});
  return alternating_sum(f, config, intensity, true);
}

MultipleIntegral::MultipleIntegral(Kernel f, const IntensityMeasure& intensity)
    : f_(std::move(f)), intensity_(&intensity) {
  check_integral_order(f_);
  if (f_.order == 0) {
    deterministic_part_ = f_(std::span<const Location>{});
  } else {
    const double sign = f_.order % 2 == 0 ? 1.0 : -1.0;
    deterministic_part_ = sign * integrate_power(intensity, f_.order, f_.eval);
  }
}

double MultipleIntegral::operator()(const PointConfiguration& config) const {
  if (f_.order == 0) return deterministic_part_;
  return deterministic_part_ + alternating_sum(f_, config, *intensity_, false);
}

Kernel star_contraction(const Kernel& f, const Kernel& g, std::size_t r, std::size_t l,
                        const IntensityMeasure& intensity) {
  const std::size_t p = f.order, q = g.order;
  if (r > std::min(p, q) || l > r) throw Error("star_contraction: require 0 <= l <= r <= min(p, q)");
  const std::size_t order = p + q - r - l;
  const IntensityMeasure* nu = &intensity;
  auto eval = [f = f.eval, g = g.eval, p, q, r, l, order, nu](std::span<const Location> x) {
    std::vector<Location> fa(p), ga(q);
    auto fill = [&](std::span<const Location> y) {
      for (std::size_t i = 0; i < l; ++i) fa[i] = ga[i] = y[i];
      for (std::size_t i = 0; i < p - l; ++i) fa[l + i] = x[i];
      for (std::size_t i = 0; i < r - l; ++i) ga[l + i] = x[i];
      for (std::size_t i = 0; i < order - (p - l); ++i) ga[r + i] = x[p - l + i];
      return f(fa) * g(ga);
    };
    if (l == 0) return fill({});
    return integrate_power(*nu, l, fill);
  };
  return {order, std::move(eval), false,
          f.label + "*" + std::to_string(r) + "^" + std::to_string(l) + g.label};
}

ChaosFunctional::ChaosFunctional(std::vector<Kernel> terms) {
  for (const Kernel& h : terms) add(h);
}

void ChaosFunctional::add(const Kernel& h) {
  for (Kernel& t : terms_) {
    if (t.order == h.order) {
      t = t + h;
      return;
    }
  }
  terms_.push_back(h);
  std::sort(terms_.begin(), terms_.end(), [](const Kernel& a, const Kernel& b) { return a.order < b.order; });
}

const Kernel* ChaosFunctional::term(std::size_t q) const {
  for (const Kernel& t : terms_) {
    if (t.order == q) return &t;
  }
  return nullptr;
}

std::size_t ChaosFunctional::max_order() const {
  return terms_.empty() ? 0 : terms_.back().order;
}

double ChaosFunctional::mean() const {
  const Kernel* h0 = term(0);
  return h0 ? (*h0)(std::span<const Location>{}) : 0.0;
}

double chaos_eval(const ChaosFunctional& F, const PointConfiguration& config, const IntensityMeasure& intensity) {
  double s = 0.0;
  for (const Kernel& h : F.terms()) s += eval_multiple_integral(h, config, intensity);
  return s;
}

PathwiseFunctional as_pathwise(const ChaosFunctional& F, const IntensityMeasure& intensity, std::string label) {
  std::vector<MultipleIntegral> parts;
  for (const Kernel& h : F.terms()) parts.emplace_back(h, intensity);
  return PathwiseFunctional::scalar(
      [parts = std::move(parts)](const PointConfiguration& c) {
        double s = 0.0;
        for (const MultipleIntegral& I : parts) s += I(c);
        return s;
      },
      std::move(label));
}

ChaosFunctional product_expand(const Kernel& f, const Kernel& g, const IntensityMeasure& intensity) {
  const std::size_t p = f.order, q = g.order;
  if (p + q > 4) throw Error("product_expand: p + q must not exceed 4");
  ChaosFunctional out;
  for (std::size_t r = 0; r <= std::min(p, q); ++r) {
    for (std::size_t l = 0; l <= r; ++l) {
      const double coeff = factorial(r) * binomial(p, r) * binomial(q, r) * binomial(r, l);
      Kernel h = symmetrize(star_contraction(f, g, r, l, intensity)).scaled(coeff);
      if (h.order == 0) {
        // Fold the ν^l integral into a plain constant.
        h = Kernel::constant(h(std::span<const Location>{}));
      }
      out.add(h);
    }
  }
  return out;
}

ExactComparison ito_isometry_check(const Kernel& f, const Kernel& g, const IntensityMeasure& intensity,
                                   std::size_t replicas, std::uint64_t seed) {
  if (replicas == 0) throw Error("ito_isometry_check: replicas must be positive");
  const MultipleIntegral If(f, intensity), Ig(g, intensity);
  std::vector<double> prod(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    prod[r] = If(eta) * Ig(eta);
  });
  ExactComparison out;
  out.estimate = estimate_mean(prod);
  out.exact = f.order == g.order
                  ? factorial(f.order) * inner_product(symmetrize(f), symmetrize(g), intensity)
                  : 0.0;
  return out;
}

double chaos_energy(const ChaosFunctional& F, const IntensityMeasure& intensity) {
  double e = 0.0;
  for (const Kernel& h : F.terms()) {
    if (h.order == 0) continue;
    const Kernel s = symmetrize(h);
    e += static_cast<double>(h.order) * factorial(h.order) * inner_product(s, s, intensity);
  }
  return e;
}

double chaos_variance(const ChaosFunctional& F, const IntensityMeasure& intensity) {
  double v = 0.0;
  for (const Kernel& h : F.terms()) {
    if (h.order == 0) continue;
    const Kernel s = symmetrize(h);
    v += factorial(h.order) * inner_product(s, s, intensity);
  }
  return v;
}

std::size_t KernelEstimate::flat_index(std::span<const std::size_t> idx) const {
  if (idx.size() != order) throw Error("KernelEstimate: wrong index arity");
  std::size_t flat = 0;
  for (std::size_t i : idx) flat = flat * grid.size() + i;
  return flat;
}

Kernel KernelEstimate::as_kernel() const {
  auto nearest = [grid = grid](const Location& z) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < kMaxDim; ++k) d += (grid[i][k] - z[k]) * (grid[i][k] - z[k]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  return {order,
          [self = *this, nearest](std::span<const Location> x) {
            std::vector<std::size_t> idx(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) idx[i] = nearest(x[i]);
            return self.values[self.flat_index(idx)];
          },
          false, "T_" + std::to_string(order)};
}

KernelEstimate chaos_kernel_estimate(const PathwiseFunctional& F, std::size_t q, std::vector<Location> grid,
                                     const IntensityMeasure& intensity, std::size_t replicas,
                                     std::uint64_t seed) {
  if (q == 0 || q > 2) throw Error("chaos_kernel_estimate: order must be 1 or 2");
  if (F.dim != 1) throw Error("chaos_kernel_estimate: scalar functional required");
  if (grid.empty()) throw Error("chaos_kernel_estimate: empty grid");
  if (replicas == 0) throw Error("chaos_kernel_estimate: replicas must be positive");
  KernelEstimate est;
  est.order = q;
  est.grid = std::move(grid);
  const std::size_t m = est.grid.size();
  const std::size_t cells = q == 1 ? m : m * m;
  std::vector<std::vector<double>> per_replica(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    std::vector<double>& out = per_replica[r];
    out.resize(cells);
    std::array<Location, 2> zs;
    for (std::size_t c = 0; c < cells; ++c) {
      if (q == 1) {
        zs[0] = est.grid[c];
      } else {
        zs[0] = est.grid[c / m];
        zs[1] = est.grid[c % m];
      }
      out[c] = iterated_add_op(F, eta, std::span<const Location>(zs.data(), q))[0];
    }
  });
  est.values.resize(cells);
  est.std_errors.resize(cells);
  std::vector<double> column(replicas);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t r = 0; r < replicas; ++r) column[r] = per_replica[r][c];
    const Estimate e = estimate_mean(column);
    est.values[c] = e.mean;
    est.std_errors[c] = e.std_error;
  }
  return est;
}

}  // namespace poismix
