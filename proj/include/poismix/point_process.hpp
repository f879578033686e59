#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poismix/rng.hpp"

namespace poismix {

/// Raised for contract violations of the toolkit (bad input, unsupported
/// orders, absent points, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a quadrature or Monte Carlo term produces a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kMaxDim = 3;

/// A point of the window. Unused coordinates are zero.
struct Location {
  std::array<double, kMaxDim> coords{};

  Location() = default;
  explicit Location(double x) : coords{x, 0.0, 0.0} {}
  Location(double x, double y) : coords{x, y, 0.0} {}
  Location(double x, double y, double z) : coords{x, y, z} {}

  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }
  double x() const { return coords[0]; }

  /// Bitwise equality of all coordinates.
  friend bool operator==(const Location& a, const Location& b);
};

/// Axis-aligned window [lo, hi] in R^dim.
struct Box {
  std::size_t dim = 1;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};

  static Box interval(double a, double b);
  bool contains(const Location& z) const;
  double volume() const;
};

/// A quadrature node: ν(f) is approximated (or, for atoms, given exactly) by
/// the weighted sum over nodes.
struct WeightedNode {
  Location location;
  double weight = 0.0;
};

struct Atom {
  Location location;
  double mass = 0.0;
};

/// Finite intensity measure on a window: either a density with respect to
/// Lebesgue measure on a box (integrated by the tensor-product midpoint rule)
/// or a finite sum of weighted atoms (integrated exactly).
class IntensityMeasure {
 public:
  enum class Kind { lebesgue_density, atomic };
  using Density = std::function<double(const Location&)>;

  static constexpr std::size_t kDefaultResolution = 1024;

  /// Density on a box; `resolution` holds the number of midpoint cells per
  /// axis (one entry, or one per axis).
  static IntensityMeasure lebesgue(Box window, Density density,
                                   std::vector<std::size_t> resolution = {kDefaultResolution});
  /// Constant density `rate` on the box.
  static IntensityMeasure uniform(Box window, double rate,
                                  std::vector<std::size_t> resolution = {kDefaultResolution});
  static IntensityMeasure atomic(std::vector<Atom> atoms);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return window_.dim; }
  const Box& window() const { return window_; }
  double total_mass() const { return total_mass_; }
  const std::vector<std::size_t>& resolution() const { return resolution_; }
  std::span<const WeightedNode> nodes() const { return nodes_; }
  bool contains(const Location& z) const;

  /// The same measure on a refined or coarsened midpoint grid. Atomic
  /// measures are returned unchanged.
  IntensityMeasure with_resolution(std::vector<std::size_t> resolution) const;

  /// ν(f). Throws NumericError if f is non-finite at some node.
  double integrate(const std::function<double(const Location&)>& f) const;

  /// Location drawn from ν / ν(window).
  Location sample_location(Rng& rng) const;

 private:
  IntensityMeasure() = default;
  void build_cumulative();

  Kind kind_ = Kind::lebesgue_density;
  Box window_;
  Density density_;
  std::vector<std::size_t> resolution_;
  std::vector<WeightedNode> nodes_;
  std::vector<double> cumulative_;
  std::vector<double> cell_width_;
  double total_mass_ = 0.0;
};

/// A finite realisation η = Σ δ_{z_i}. The intensity is referenced, not
/// owned; it must outlive the configuration.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  explicit PointConfiguration(const IntensityMeasure& intensity) : intensity_(&intensity) {}
  PointConfiguration(const IntensityMeasure& intensity, std::vector<Location> points);

  std::span<const Location> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Location& operator[](std::size_t i) const { return points_[i]; }
  const IntensityMeasure* intensity() const { return intensity_; }

  bool contains(const Location& z) const;

  /// η + δ_z.
  PointConfiguration add_point(const Location& z) const;
  /// η − δ_z; removes one occurrence (exact coordinate match). Throws Error
  /// if z is not a point of the configuration.
  PointConfiguration drop_point(const Location& z) const;
  /// η − δ_{z_i} for the i-th listed point.
  PointConfiguration drop_index(std::size_t i) const;

 private:
  const IntensityMeasure* intensity_ = nullptr;
  std::vector<Location> points_;
};

/// Poisson point process on the intensity window. Deterministic in the
/// engine state.
PointConfiguration sample_ppp(const IntensityMeasure& intensity, Rng& rng);
PointConfiguration sample_ppp(const IntensityMeasure& intensity, std::uint64_t master_seed,
                              std::uint64_t replica);

using Region = std::function<bool(const Location&)>;

/// η(B).
std::size_t count(const PointConfiguration& config, const Region& region);

/// η(f) = Σ f(z_i).
double integrate_config(const PointConfiguration& config,
                        const std::function<double(const Location&)>& f);

/// η̂(f) = η(f) − ν(f).
double compensated_integrate(const PointConfiguration& config, const IntensityMeasure& intensity,
                             const std::function<double(const Location&)>& f);

/// Visits every ordered q-tuple of pairwise distinct indices (η^{(q)}).
/// q = 0 visits the empty tuple once.
void for_each_factorial_tuple(const PointConfiguration& config, std::size_t q,
                              const std::function<void(std::span<const Location>)>& visit);

/// The support of η^{(q)} as an explicit list; length n!/(n−q)!.
std::vector<std::vector<Location>> factorial_power(const PointConfiguration& config,
                                                   std::size_t q);

/// Half-open interval [a, b) on the first axis.
Region interval_region(double a, double b);

}  // namespace poismix
