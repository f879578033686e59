#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poismix/functionals.hpp"
#include "poismix/point_process.hpp"
#include "poismix/stats.hpp"

namespace poismix {

inline constexpr std::size_t kMaxIntegralOrder = 3;
inline constexpr std::size_t kMaxSymmetrizeOrder = 4;

/// A kernel f: Z^q → R given by its evaluation rule.
struct Kernel {
  std::size_t order = 0;
  std::function<double(std::span<const Location>)> eval;
  bool symmetric = false;
  std::string label;

  double operator()(std::span<const Location> args) const;

  static Kernel constant(double c);
  /// f(x_1, …, x_q) = Π_i h_i(x_i).
  static Kernel tensor(std::vector<std::function<double(const Location&)>> factors, std::string label = {});
  /// 1_{B_1 × ⋯ × B_q}.
  static Kernel indicator(std::vector<Region> regions, std::string label = {});

  Kernel scaled(double c) const;
};

Kernel operator+(const Kernel& f, const Kernel& g);

/// ∫ fn dν^k over the tensor quadrature grid; k = 0 returns fn(()).
double integrate_power(const IntensityMeasure& intensity, std::size_t k,
                       const std::function<double(std::span<const Location>)>& fn);

/// ⟨f, g⟩ in L²(ν^q).
double inner_product(const Kernel& f, const Kernel& g, const IntensityMeasure& intensity);

/// Average of f over all permutations of its arguments; q ≤ 4.
Kernel symmetrize(const Kernel& f);

/// max |f(x) − f(σx)| over all permutations σ, at the given tuples.
double symmetry_defect(const Kernel& f, std::span<const std::vector<Location>> tuples);

/// I_q(f) on one configuration via the alternating sum over J ⊂ [q] of
/// η^{(|J|)} ⊗ ν^{q−|J|} integrals. q ≤ 3.
double eval_multiple_integral(const Kernel& f, const PointConfiguration& config,
                              const IntensityMeasure& intensity);

/// I_q(f) with the configuration-independent ν^q part computed once.
class MultipleIntegral {
 public:
  MultipleIntegral(Kernel f, const IntensityMeasure& intensity);
  double operator()(const PointConfiguration& config) const;
  const Kernel& kernel() const { return f_; }

 private:
  Kernel f_;
  const IntensityMeasure* intensity_;
  double deterministic_part_ = 0.0;
};

/// f ⋆_r^l g (x_1, …, x_{p+q−r−l}) = ∫ f(y, x_1..x_{p−l}) g(y, x_1..x_{r−l}, x_{p−l+1}..) ν^l(dy).
Kernel star_contraction(const Kernel& f, const Kernel& g, std::size_t r, std::size_t l,
                        const IntensityMeasure& intensity);

/// F = Σ_q I_q(h_q): one symmetric kernel per order; the kernel already
/// carries any 1/q! normalisation.
class ChaosFunctional {
 public:
  ChaosFunctional() = default;
  explicit ChaosFunctional(std::vector<Kernel> terms);

  /// Adds h to the term of its order (creating the term if absent).
  void add(const Kernel& h);

  std::span<const Kernel> terms() const { return terms_; }
  const Kernel* term(std::size_t q) const;
  std::size_t max_order() const;
  /// The constant term; 0 if absent.
  double mean() const;

 private:
  std::vector<Kernel> terms_;
};

/// Σ_q I_q(h_q)(η).
double chaos_eval(const ChaosFunctional& F, const PointConfiguration& config,
                  const IntensityMeasure& intensity);

/// Pathwise view of a chaos expansion with the ν^q parts precomputed.
PathwiseFunctional as_pathwise(const ChaosFunctional& F, const IntensityMeasure& intensity,
                               std::string label = "chaos");

/// I_p(f) I_q(g) = Σ_{r≤p∧q} Σ_{l≤r} r! C(p,r) C(q,r) C(r,l) I_{p+q−r−l}(f ⋆_r^l g).
/// Requires p + q ≤ 4.
ChaosFunctional product_expand(const Kernel& f, const Kernel& g, const IntensityMeasure& intensity);

/// Monte Carlo E I_q(f) I_{q'}(g) against q! ⟨f_σ, g_σ⟩ 1{q = q'}.
ExactComparison ito_isometry_check(const Kernel& f, const Kernel& g, const IntensityMeasure& intensity,
                                   std::size_t replicas, std::uint64_t seed);

/// E ∫ |D_z F|² ν(dz) = Σ_q q · q! · ‖h_q‖² for F = Σ I_q(h_q).
double chaos_energy(const ChaosFunctional& F, const IntensityMeasure& intensity);
/// E F² − (E F)² = Σ_{q≥1} q! ‖h_q‖².
double chaos_variance(const ChaosFunctional& F, const IntensityMeasure& intensity);

/// Pointwise Monte Carlo estimate of T_q F = E D^q F on grid^q.
struct KernelEstimate {
  std::size_t order = 0;
  std::vector<Location> grid;
  /// Row-major over grid^q.
  std::vector<double> values;
  std::vector<double> std_errors;

  std::size_t flat_index(std::span<const std::size_t> idx) const;
  /// Piecewise-constant kernel: each argument snaps to the nearest grid node.
  Kernel as_kernel() const;
};

KernelEstimate chaos_kernel_estimate(const PathwiseFunctional& F, std::size_t q, std::vector<Location> grid,
                                     const IntensityMeasure& intensity, std::size_t replicas,
                                     std::uint64_t seed);

}  // namespace poismix
