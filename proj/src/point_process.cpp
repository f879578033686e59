#include "poismix/point_process.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "poismix/stats.hpp"

namespace poismix {

bool operator==(const Location& a, const Location& b) {
  for (std::size_t i = 0; i < kMaxDim; ++i) {
    if (std::bit_cast<std::uint64_t>(a.coords[i]) != std::bit_cast<std::uint64_t>(b.coords[i]))
      return false;
  }
  return true;
}

Box Box::interval(double a, double b) {
  if (!(a < b)) throw Error("Box::interval: empty interval");
  Box box;
  box.dim = 1;
  box.lo[0] = a;
  box.hi[0] = b;
  return box;
}

bool Box::contains(const Location& z) const {
  for (std::size_t i = 0; i < dim; ++i) {
    if (z[i] < lo[i] || z[i] > hi[i]) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim; ++i) v *= hi[i] - lo[i];
  return v;
}

IntensityMeasure IntensityMeasure::lebesgue(Box window, Density density,
                                            std::vector<std::size_t> resolution) {
  if (window.dim == 0 || window.dim > kMaxDim) throw Error("intensity: window dimension must be 1..3");
  for (std::size_t i = 0; i < window.dim; ++i) {
    if (!(window.lo[i] < window.hi[i]) || !std::isfinite(window.lo[i]) || !std::isfinite(window.hi[i]))
      throw Error("intensity: window must be a finite non-empty box");
  }
  if (resolution.size() == 1) resolution.assign(window.dim, resolution.front());
  if (resolution.size() != window.dim) throw Error("intensity: one resolution per axis expected");
  if (std::any_of(resolution.begin(), resolution.end(), [](std::size_t r) { return r == 0; }))
    throw Error("intensity: resolution must be positive");
  if (!density) throw Error("intensity: density is empty");

  IntensityMeasure m;
  m.kind_ = Kind::lebesgue_density;
  m.window_ = window;
  m.density_ = std::move(density);
  m.resolution_ = resolution;
  m.cell_width_.resize(window.dim);
  double cell_volume = 1.0;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < window.dim; ++i) {
    m.cell_width_[i] = (window.hi[i] - window.lo[i]) / static_cast<double>(resolution[i]);
    cell_volume *= m.cell_width_[i];
    cells *= resolution[i];
  }
  m.nodes_.reserve(cells);
  std::array<std::size_t, kMaxDim> idx{};
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    for (std::size_t i = window.dim; i-- > 0;) {
      idx[i] = rest % resolution[i];
      rest /= resolution[i];
    }
    Location z;
    for (std::size_t i = 0; i < window.dim; ++i)
      z[i] = window.lo[i] + (static_cast<double>(idx[i]) + 0.5) * m.cell_width_[i];
    const double rho = m.density_(z);
    if (!std::isfinite(rho) || rho < 0.0)
      throw Error("intensity: density must be finite and non-negative on the window");
    m.nodes_.push_back({z, rho * cell_volume});
  }
  m.build_cumulative();
  return m;
}

IntensityMeasure IntensityMeasure::uniform(Box window, double rate, std::vector<std::size_t> resolution) {
  if (!std::isfinite(rate) || rate < 0.0) throw Error("intensity: rate must be finite and non-negative");
  return lebesgue(window, [rate](const Location&) { return rate; }, std::move(resolution));
}

IntensityMeasure IntensityMeasure::atomic(std::vector<Atom> atoms) {
  IntensityMeasure m;
  m.kind_ = Kind::atomic;
  m.window_.dim = 1;
  bool first = true;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.mass) || a.mass <= 0.0) throw Error("intensity: atom masses must be positive and finite");
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      if (!std::isfinite(a.location[i])) throw Error("intensity: atom location must be finite");
      if (a.location[i] != 0.0) m.window_.dim = std::max(m.window_.dim, i + 1);
    }
    for (std::size_t i = 0; i < kMaxDim; ++i) {
      m.window_.lo[i] = first ? a.location[i] : std::min(m.window_.lo[i], a.location[i]);
      m.window_.hi[i] = first ? a.location[i] : std::max(m.window_.hi[i], a.location[i]);
    }
    first = false;
    m.nodes_.push_back({a.location, a.mass});
  }
  m.build_cumulative();
  return m;
}

void IntensityMeasure::build_cumulative() {
  cumulative_.resize(nodes_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    acc += nodes_[i].weight;
    cumulative_[i] = acc;
  }
  std::vector<double> w(nodes_.size());
  std::transform(nodes_.begin(), nodes_.end(), w.begin(), [](const WeightedNode& n) { return n.weight; });
  total_mass_ = pairwise_sum(w);
  if (!std::isfinite(total_mass_)) throw Error("intensity: total mass is not finite");
}

bool IntensityMeasure::contains(const Location& z) const {
  if (kind_ == Kind::atomic) {
    return std::any_of(nodes_.begin(), nodes_.end(), [&](const WeightedNode& n) { return n.location == z; });
  }
  return window_.contains(z);
}

IntensityMeasure IntensityMeasure::with_resolution(std::vector<std::size_t> resolution) const {
  if (kind_ == Kind::atomic) return *this;
  return lebesgue(window_, density_, std::move(resolution));
}

double IntensityMeasure::integrate(const std::function<double(const Location&)>& f) const {
  std::vector<double> terms(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double v = f(nodes_[i].location);
    if (!std::isfinite(v)) throw NumericError("quadrature: integrand is not finite at a node");
    terms[i] = nodes_[i].weight * v;
  }
  return pairwise_sum(terms);
}

Location IntensityMeasure::sample_location(Rng& rng) const {
  if (nodes_.empty() || total_mass_ <= 0.0) throw Error("intensity: cannot sample from a null measure");
  const double target = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t cell = static_cast<std::size_t>(it - cumulative_.begin());
  if (cell >= nodes_.size()) cell = nodes_.size() - 1;
  // Zero-weight cells are never selected by upper_bound except at the very
  // end; walk back to the last cell that carries mass.
  while (nodes_[cell].weight <= 0.0 && cell > 0) --cell;
  if (kind_ == Kind::atomic) return nodes_[cell].location;
  Location z = nodes_[cell].location;
  for (std::size_t i = 0; i < window_.dim; ++i) {
    const double lo = z[i] - 0.5 * cell_width_[i];
    z[i] = std::min(lo + uniform01(rng) * cell_width_[i], window_.hi[i]);
  }
  return z;
}

PointConfiguration::PointConfiguration(const IntensityMeasure& intensity, std::vector<Location> points)
    : intensity_(&intensity), points_(std::move(points)) {
  for (const Location& z : points_) {
    if (!intensity.contains(z)) throw Error("configuration: point outside the intensity window");
  }
}

bool PointConfiguration::contains(const Location& z) const {
  return std::find(points_.begin(), points_.end(), z) != points_.end();
}

PointConfiguration PointConfiguration::add_point(const Location& z) const {
  PointConfiguration out;
  out.intensity_ = intensity_;
  out.points_.reserve(points_.size() + 1);
  out.points_ = points_;
  out.points_.push_back(z);
  return out;
}

PointConfiguration PointConfiguration::drop_point(const Location& z) const {
  auto it = std::find(points_.begin(), points_.end(), z);
  if (it == points_.end()) throw Error("drop_point: location is not a point of the configuration");
  return drop_index(static_cast<std::size_t>(it - points_.begin()));
}

PointConfiguration PointConfiguration::drop_index(std::size_t i) const {
  if (i >= points_.size()) throw Error("drop_index: index out of range");
  PointConfiguration out;
  out.intensity_ = intensity_;
  out.points_.reserve(points_.size() - 1);
  out.points_.insert(out.points_.end(), points_.begin(), points_.begin() + static_cast<std::ptrdiff_t>(i));
  out.points_.insert(out.points_.end(), points_.begin() + static_cast<std::ptrdiff_t>(i) + 1, points_.end());
  return out;
}

PointConfiguration sample_ppp(const IntensityMeasure& intensity, Rng& rng) {
  PointConfiguration config(intensity);
  const double mass = intensity.total_mass();
  if (mass <= 0.0) return config;
  std::poisson_distribution<long long> count_dist(mass);
  const long long n = count_dist(rng);
  std::vector<Location> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) pts.push_back(intensity.sample_location(rng));
  return PointConfiguration(intensity, std::move(pts));
}

PointConfiguration sample_ppp(const IntensityMeasure& intensity, std::uint64_t master_seed,
                              std::uint64_t replica) {
  Rng rng = make_stream(master_seed, replica, StreamTag::configuration);
  return sample_ppp(intensity, rng);
}

std::size_t count(const PointConfiguration& config, const Region& region) {
  return static_cast<std::size_t>(
      std::count_if(config.points().begin(), config.points().end(), [&](const Location& z) { return region(z); }));
}

double integrate_config(const PointConfiguration& config, const std::function<double(const Location&)>& f) {
  double s = 0.0;
  for (const Location& z : config.points()) s += f(z);
  return s;
}

double compensated_integrate(const PointConfiguration& config, const IntensityMeasure& intensity,
                             const std::function<double(const Location&)>& f) {
  return integrate_config(config, f) - intensity.integrate(f);
}

namespace {

void visit_tuples(std::span<const Location> pts, std::size_t q, std::vector<Location>& tuple,
                  std::vector<char>& used, const std::function<void(std::span<const Location>)>& visit) {
  if (tuple.size() == q) {
    visit(tuple);
    return;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    tuple.push_back(pts[i]);
    visit_tuples(pts, q, tuple, used, visit);
    tuple.pop_back();
    used[i] = 0;
  }
}

}  // namespace

void for_each_factorial_tuple(const PointConfiguration& config, std::size_t q,
                              const std::function<void(std::span<const Location>)>& visit) {
  if (q > config.size()) return;
  std::vector<Location> tuple;
  tuple.reserve(q);
  std::vector<char> used(config.size(), 0);
  visit_tuples(config.points(), q, tuple, used, visit);
}

std::vector<std::vector<Location>> factorial_power(const PointConfiguration& config, std::size_t q) {
  std::vector<std::vector<Location>> out;
  for_each_factorial_tuple(config, q, [&](std::span<const Location> t) { out.emplace_back(t.begin(), t.end()); });
  return out;
}

Region interval_region(double a, double b) {
  return [a, b](const Location& z) { return z[0] >= a && z[0] < b; };
}

}  // namespace poismix
