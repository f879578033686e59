#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "poismix/point_process.hpp"
#include "poismix/stats.hpp"

namespace poismix {

using Value = Eigen::VectorXd;

/// F = f(η) with values in R^dim, given by its evaluation rule.
struct PathwiseFunctional {
  std::size_t dim = 1;
  std::function<Value(const PointConfiguration&)> eval;
  std::string label;

  Value operator()(const PointConfiguration& config) const;

  static PathwiseFunctional scalar(std::function<double(const PointConfiguration&)> f,
                                   std::string label = {});
  static PathwiseFunctional constant(double c);
  /// η(B).
  static PathwiseFunctional counting(Region region, std::string label = "count");
};

/// u(η, z) with values in R^dim. Evaluable at every z of the window.
struct RandomField {
  std::size_t dim = 1;
  std::function<Value(const PointConfiguration&, const Location&)> eval;
  std::string label;

  Value operator()(const PointConfiguration& config, const Location& z) const;

  static RandomField scalar(std::function<double(const PointConfiguration&, const Location&)> u,
                            std::string label = {});
  /// A field that does not depend on η.
  static RandomField deterministic(std::function<double(const Location&)> h, std::string label = {});
  static RandomField zero(std::size_t dim = 1);
};

/// D⁺_z F = F(η + δ_z) − F(η).
Value add_op(const PathwiseFunctional& F, const PointConfiguration& config, const Location& z);

/// D⁻_z F = (F(η) − F(η − δ_z)) 1{z ∈ η}.
Value drop_op(const PathwiseFunctional& F, const PointConfiguration& config, const Location& z);

/// D⁺_{z_1} ⋯ D⁺_{z_q} F, evaluated by inclusion–exclusion over the 2^q
/// configurations η + Σ_{i∈J} δ_{z_i}.
Value iterated_add_op(const PathwiseFunctional& F, const PointConfiguration& config,
                      std::span<const Location> zs);

/// z ↦ D⁺_z F as a random field.
RandomField derivative_field(PathwiseFunctional F);

/// z ↦ D⁺_z u(·) for a fixed second argument, i.e. (η, x) ↦ u(η + δ_z, x) − u(η, x).
RandomField add_op_field(RandomField u, Location z);

using MeckeIntegrand = std::function<double(const PointConfiguration&, const Location&)>;

/// Monte Carlo comparison of E Σ_{z∈η} f(η, z) with E ∫ f(η + δ_z, z) ν(dz);
/// both sides are evaluated on the same configurations.
PairedComparison mecke_check(const MeckeIntegrand& f, const IntensityMeasure& intensity,
                             std::size_t replicas, std::uint64_t seed);

}  // namespace poismix
