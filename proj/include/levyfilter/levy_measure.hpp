#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "levyfilter/errors.hpp"
#include "levyfilter/rng.hpp"

namespace levyfilter {

enum class Support { positive_half_line, full_line };

enum class MeasureFamily { exponential, tempered_stable, tabulated };

/// Monotone tail-mass table on a log-spaced grid.
///
/// Node values U(z_k) come from per-segment Gauss-Kronrod quadrature summed
/// from the right; between nodes the table interpolates log U against log z
/// with a monotone cubic Hermite rule using the exact node slopes
/// d log U / d log z = -z f(z) / U(z).
class TailTable {
 public:
  TailTable() = default;
  TailTable(std::vector<double> z, std::vector<double> tail, std::vector<double> log_slope);

  std::span<const double> nodes() const { return z_; }
  std::span<const double> tails() const { return u_; }
  double z_min() const { return z_.front(); }
  double z_max() const { return z_.back(); }
  double u_at_min() const { return u_.front(); }
  double u_at_max() const { return u_.back(); }
  bool empty() const { return z_.empty(); }

  /// Interpolated U(z) for z in [z_min, z_max].
  double value(double z) const;
  /// Inverse of value() for u in [u_at_max, u_at_min], by safeguarded
  /// Newton/bisection on the bracketing segment.
  double inverse(double u) const;

 private:
  double hermite(std::size_t k, double s) const;
  double hermite_deriv(std::size_t k, double s) const;
  std::size_t segment_for_z(double logz) const;
  std::size_t segment_for_u(double logu) const;

  std::vector<double> z_;
  std::vector<double> u_;
  std::vector<double> logz_;
  std::vector<double> logu_;
  std::vector<double> slope_;
};

struct SmallJumpReport {
  bool finite = false;
  /// Estimate of the integral of |z| over {|z| <= 1}; the last partial sum
  /// when divergent.
  double value = 0.0;
  /// Local power exponent of the partial-sum increments; <= 0 means divergence.
  double decay_exponent = 0.0;
};

/// One-dimensional Lévy measure with a density.
///
/// Families:
///  - exponential(rate, scale): density rate/scale * exp(-z/scale) on z > 0;
///  - tempered_stable(stability, tempering, prefactor): density
///    prefactor * |z|^{-stability-1} * exp(-tempering |z|), either on z > 0
///    (subordinator) or symmetric on the full line;
///  - tabulated: piecewise-linear density through given samples on z >= 0.
///
/// Immutable after construction; copies share the tail table.
class LevyMeasure {
 public:
  static constexpr double kDefaultFloor = 1e-6;

  static LevyMeasure exponential(double rate, double scale = 1.0);
  static LevyMeasure tempered_stable(double stability, Support support = Support::positive_half_line,
                                     double tempering = 1.0, double prefactor = 1.0);
  static LevyMeasure tabulated(std::vector<double> z, std::vector<double> density);

  MeasureFamily family() const { return family_; }
  Support support() const { return support_; }
  bool finite_activity() const { return family_ != MeasureFamily::tempered_stable; }
  /// Total mass for finite activity, +infinity otherwise.
  double total_mass() const;
  double stability() const { return p0_; }
  /// Length over which the density decays by a factor e at large z
  /// (scale, 1/tempering, or the tabulated extent).
  double decay_length() const;
  std::string describe() const;

  double density(double z) const;
  /// Analytic continuation of the density on the positive branch; only for
  /// exponential and tempered-stable families.
  std::complex<double> density(std::complex<double> z) const;
  bool analytic() const { return family_ != MeasureFamily::tabulated; }

  /// nu((z, inf)) for z > 0, -nu((-inf, z)) for z < 0; 0 at +-infinity;
  /// total mass (finite) or +infinity (sigma-finite) at z = 0.
  double tail_integral(double z) const;
  /// Positive-half tail, z >= 0.
  double positive_tail(double z) const;
  /// z > 0 with positive_tail(z) = u.
  double inverse_tail(double u) const;
  /// nu(support \ (-eps, eps)).
  double truncated_mass(double eps) const;

  /// Jump size distributed as nu restricted to |z| > eps, normalised.
  template <std::uniform_random_bit_generator G>
  double sample_jump_size(double eps, G& rng) const;

  SmallJumpReport check_small_jump_integrability() const;

  const TailTable& tail_table() const { return *table_; }
  /// Range [lo, hi] over which jump-size tables are built.
  double table_lo() const;
  double table_hi() const;

 private:
  LevyMeasure() = default;
  void build_table(double floor);
  double sample_positive_magnitude(double eps, double u01) const;
  double tabulated_tail(double z) const;
  double tabulated_inverse(double u) const;

  MeasureFamily family_ = MeasureFamily::exponential;
  Support support_ = Support::positive_half_line;
  // exponential: p0 = rate, p1 = scale
  // tempered_stable: p0 = stability, p1 = tempering, p2 = prefactor
  double p0_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::shared_ptr<const std::vector<double>> tab_z_;
  std::shared_ptr<const std::vector<double>> tab_f_;
  std::shared_ptr<const std::vector<double>> tab_cum_;  // mass on [0, z_k]
  std::shared_ptr<const TailTable> table_;
  double below_floor_mass_ = 0.0;  // finite families: mass on (0, floor)
};

template <std::uniform_random_bit_generator G>
double LevyMeasure::sample_jump_size(double eps, G& rng) const {
  const double u = uniform_open(rng);
  const double z = sample_positive_magnitude(eps, u);
  if (support_ == Support::full_line) {
    const double s = uniform_open(rng);
    return s < 0.5 ? -z : z;
  }
  return z;
}

}  // namespace levyfilter
