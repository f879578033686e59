#include "poismix/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "poismix/parallel.hpp"

namespace poismix {

namespace {

void check_dim(const Value& v, std::size_t dim, const std::string& label) {
  if (static_cast<std::size_t>(v.size()) != dim)
    throw Error("functional '" + label + "' returned a value of the wrong dimension");
}

}  // namespace

Value PathwiseFunctional::operator()(const PointConfiguration& config) const {
  Value v = eval(config);
  check_dim(v, dim, label);
  return v;
}

PathwiseFunctional PathwiseFunctional::scalar(std::function<double(const PointConfiguration&)> f,
                                              std::string label) {
  return {1, [f = std::move(f)](const PointConfiguration& c) { return Value::Constant(1, f(c)); },
          std::move(label)};
}

PathwiseFunctional PathwiseFunctional::constant(double c) {
  return scalar([c](const PointConfiguration&) { return c; }, "constant");
}

PathwiseFunctional PathwiseFunctional::counting(Region region, std::string label) {
  return scalar([region = std::move(region)](const PointConfiguration& c) {
    return static_cast<double>(count(c, region));
  }, std::move(label));
}

Value RandomField::operator()(const PointConfiguration& config, const Location& z) const {
  Value v = eval(config, z);
  check_dim(v, dim, label);
  return v;
}

RandomField RandomField::scalar(std::function<double(const PointConfiguration&, const Location&)> u,
                                std::string label) {
  return {1,
          [u = std::move(u)](const PointConfiguration& c, const Location& z) {
            return Value::Constant(1, u(c, z));
          },
          std::move(label)};
}

RandomField RandomField::deterministic(std::function<double(const Location&)> h, std::string label) {
  return scalar([h = std::move(h)](const PointConfiguration&, const Location& z) { return h(z); },
                std::move(label));
}

RandomField RandomField::zero(std::size_t dim) {
  return {dim, [dim](const PointConfiguration&, const Location&) {
            return Value::Zero(static_cast<Eigen::Index>(dim)).eval();
          }, "zero"};
}

Value add_op(const PathwiseFunctional& F, const PointConfiguration& config, const Location& z) {
  return F(config.add_point(z)) - F(config);
}

Value drop_op(const PathwiseFunctional& F, const PointConfiguration& config, const Location& z) {
  if (!config.contains(z)) return Value::Zero(static_cast<Eigen::Index>(F.dim));
  return F(config) - F(config.drop_point(z));
}

Value iterated_add_op(const PathwiseFunctional& F, const PointConfiguration& config,
                      std::span<const Location> zs) {
  const std::size_t q = zs.size();
  if (q == 0) throw Error("iterated_add_op: at least one location is required");
  if (q > 20) throw Error("iterated_add_op: order too large");
  std::vector<Location> sorted(zs.begin(), zs.end());
  std::sort(sorted.begin(), sorted.end(), [](const Location& a, const Location& b) { return a.coords < b.coords; });
  Value acc = Value::Zero(static_cast<Eigen::Index>(F.dim));
  for (std::size_t mask = 0; mask < (std::size_t{1} << q); ++mask) {
    PointConfiguration c = config;
    int size = 0;
    for (std::size_t i = 0; i < q; ++i) {
      if (mask & (std::size_t{1} << i)) {
        c = c.add_point(sorted[i]);
        ++size;
      }
    }
    const bool negative = (static_cast<int>(q) - size) % 2 != 0;
    if (negative)
      acc -= F(c);
    else
      acc += F(c);
  }
  return acc;
}

RandomField derivative_field(PathwiseFunctional F) {
  const std::size_t dim = F.dim;
  std::string label = "D" + F.label;
  return {dim,
          [F = std::move(F)](const PointConfiguration& c, const Location& z) { return add_op(F, c, z); },
          std::move(label)};
}

RandomField add_op_field(RandomField u, Location z) {
  const std::size_t dim = u.dim;
  std::string label = "D+" + u.label;
  return {dim,
          [u = std::move(u), z](const PointConfiguration& c, const Location& x) {
            return (u(c.add_point(z), x) - u(c, x)).eval();
          },
          std::move(label)};
}

PairedComparison mecke_check(const MeckeIntegrand& f, const IntensityMeasure& intensity,
                             std::size_t replicas, std::uint64_t seed) {
  if (replicas == 0) throw Error("mecke_check: replicas must be positive");
  std::vector<double> lhs(replicas), rhs(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    const PointConfiguration eta = sample_ppp(intensity, seed, r);
    double l = 0.0;
    for (const Location& z : eta.points()) l += f(eta, z);
    lhs[r] = l;
    rhs[r] = intensity.integrate([&](const Location& z) { return f(eta.add_point(z), z); });
  });
  return compare_paired(lhs, rhs);
}

}  // namespace poismix
