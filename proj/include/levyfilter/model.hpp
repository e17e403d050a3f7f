#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "levyfilter/levy_copula.hpp"
#include "levyfilter/levy_measure.hpp"
#include "levyfilter/rng.hpp"

namespace levyfilter {

/// Signal drift b(x) = intercept + slope * x.
struct DriftSpec {
  enum class Kind { zero, constant, linear };
  Kind kind = Kind::zero;
  double slope = 0.0;
  double intercept = 0.0;

  static DriftSpec zero() { return {}; }
  static DriftSpec constant(double b) { return {Kind::constant, 0.0, b}; }
  static DriftSpec linear(double slope, double intercept = 0.0) {
    return {Kind::linear, slope, intercept};
  }

  double operator()(double x) const { return intercept + slope * x; }
  bool is_constant() const { return kind != Kind::linear || slope == 0.0; }
};

/// Observation sensor g(x).
struct SensorSpec {
  enum class Kind { zero, constant, gaussian_bump, linear };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;

  static SensorSpec zero() { return {}; }
  static SensorSpec constant(double c) { return {Kind::constant, c, 0.0, 1.0}; }
  /// amplitude * exp(-((x - center) / width)^2)
  static SensorSpec gaussian_bump(double amplitude = 1.0, double center = 0.0, double width = 1.0) {
    return {Kind::gaussian_bump, amplitude, center, width};
  }
  /// amplitude * (x - center); unbounded, meant for local tests only.
  static SensorSpec linear(double amplitude, double center = 0.0) {
    return {Kind::linear, amplitude, center, 1.0};
  }

  double operator()(double x) const {
    switch (kind) {
      case Kind::zero:
        return 0.0;
      case Kind::constant:
        return amplitude;
      case Kind::gaussian_bump: {
        const double s = (x - center) / width;
        return amplitude * std::exp(-s * s);
      }
      case Kind::linear:
        return amplitude * (x - center);
    }
    return 0.0;
  }
  bool is_zero() const { return kind == Kind::zero || amplitude == 0.0; }
  bool bounded() const { return kind != Kind::linear || amplitude == 0.0; }
};

/// Law of X(0).
class InitialLaw {
 public:
  enum class Kind { gaussian, uniform, tabulated, point };

  static InitialLaw gaussian(double mean, double sd);
  static InitialLaw uniform(double lo, double hi);
  /// Piecewise-linear density through (x, p); normalised internally.
  static InitialLaw tabulated(std::vector<double> x, std::vector<double> p);
  /// Dirac mass; usable by simulators only.
  static InitialLaw point(double x);

  Kind kind() const { return kind_; }
  double mean() const;
  double pdf(double x) const;
  /// P(lo <= X0 <= hi).
  double mass_inside(double lo, double hi) const;
  double sample(double u_primary, double u_secondary) const;

  template <std::uniform_random_bit_generator G>
  double sample(G& rng) const {
    const double a = uniform_open(rng);
    const double b = uniform_open(rng);
    return sample(a, b);
  }

 private:
  double tab_cdf(double x) const;

  Kind kind_ = Kind::gaussian;
  double a_ = 0.0;  // gaussian mean / uniform lo / point location
  double b_ = 1.0;  // gaussian sd / uniform hi
  std::vector<double> x_;
  std::vector<double> p_;
  std::vector<double> cum_;
};

/// Sobolev-type exponents the analysis assumes rather than computes.
struct DeclaredExponents {
  double delta_g = 1.0;  // regularity of g
  double rho = 0.5;      // regularity of the solution
  double rho0 = 0.5;     // regularity of the initial density
  /// Upper index of the jump symbols; NaN means "estimate it".
  double beta_plus = std::nan("");
};

/// Complete filtering model
///   dX = b(X) dt + dL0 + dL1,   dY = g(X) dt + dW + dL2,
/// with (L1, L2) coupled through a Lévy copula and L0 a symmetric tempered
/// stable process truncated at epsilon.
struct ModelSpec {
  ModelSpec(LevyMeasure nu1_, LevyMeasure nu2_, LevyCopula copula_)
      : nu1(std::move(nu1_)), nu2(std::move(nu2_)), copula(copula_) {}

  DriftSpec drift;
  SensorSpec sensor;
  LevyMeasure nu1;
  LevyMeasure nu2;
  LevyCopula copula;
  /// Symmetric tempered-stable measure of L0; empty when L0 is absent.
  std::optional<LevyMeasure> l0;
  double epsilon = 0.05;
  InitialLaw x0 = InitialLaw::gaussian(0.0, 1.0);
  DeclaredExponents exponents;

  /// True when observed jumps carry a conditional signal jump.
  bool common_jumps() const { return copula.family() != CopulaFamily::independence; }
  /// Rate of L1 jumps that are not seen in Y (independence copula only).
  double signal_only_rate() const;
  /// Rate of observed jumps, nu2 restricted to z > epsilon.
  double observed_jump_rate() const;
  /// Throws DomainError when the configuration is inconsistent.
  void validate() const;
  /// Checks sup |g| on [-half_width, half_width]; throws DomainError if g is
  /// unbounded or non-finite there.
  double sensor_bound(double half_width) const;
};

/// Symmetric tempered-stable L0 with stability alpha in (1, 2).
LevyMeasure make_l0(double alpha, double tempering = 1.0, double prefactor = 1.0);

}  // namespace levyfilter
