#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "levyfilter/errors.hpp"
#include "levyfilter/levy_measure.hpp"
#include "levyfilter/rng.hpp"

namespace levyfilter {

enum class CopulaFamily { clayton, independence, complete_dependence };

/// Two-dimensional Lévy copula on the positive quadrant.
///
/// Clayton: H(u1, u2) = sign_weight * (w u1^-theta + w u2^-theta)^(-1/theta)
/// with w = 1/2 (half_weights) or w = 1 (standard form, exact margins).
/// The half-weight form has H(u, u) = u and margins 2^(1/theta) u.
class LevyCopula {
 public:
  static LevyCopula clayton(double theta, bool half_weights = true, double sign_weight = 1.0);
  static LevyCopula independence();
  static LevyCopula complete_dependence();

  CopulaFamily family() const { return family_; }
  double theta() const { return theta_; }
  bool half_weights() const { return weight_ == 0.5; }
  double sign_weight() const { return sign_; }
  std::string describe() const;

  /// H(u1, u2); +infinity is accepted for either argument.
  double eval(double u1, double u2) const;
  /// dH/du2 at (u1, u2); u1 may be +infinity.
  double d_du2(double u1, double u2) const;
  /// Mixed density d^2 H / du1 du2 (Clayton only).
  double mixed_density(double u1, double u2) const;
  /// u1 with d_du2(u1, u2) = y, for 0 < y < d_du2(inf, u2) (Clayton only).
  double inverse_d_du2(double y, double u2) const;

 private:
  LevyCopula() = default;
  void check_args(double u1, double u2) const;

  CopulaFamily family_ = CopulaFamily::independence;
  double theta_ = 0.0;
  double weight_ = 1.0;
  double sign_ = 1.0;
};

/// nu([z1, inf) x [z2, inf)) = H(U1(z1), U2(z2)).
double joint_tail(const LevyCopula& c, const LevyMeasure& m1, const LevyMeasure& m2, double z1,
                  double z2);

/// Common-jump rate and survival copula of a finite-activity pair.
struct SurvivalCopula {
  LevyCopula copula;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// H(lambda1, lambda2); zero means there are no common jumps.
  double lambda_h = 0.0;

  /// C(u, v) = H(lambda1 u, lambda2 v) / lambda_h on [0, 1]^2.
  double operator()(double u, double v) const;
};

SurvivalCopula survival_copula_finite(const LevyCopula& c, double lambda1, double lambda2);

/// max |H(g u, g v) / H(g, g) - H(u, v)| over the scale grid and random
/// pairs (u, v) drawn log-uniformly from [0.1, 10].
template <class F>
  requires std::invocable<F&, double, double>
double scaling_check(F&& h, std::span<const double> gammas, int pairs = 64, std::uint64_t seed = 7) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const double u = std::pow(10.0, 2.0 * uniform_open(rng) - 1.0);
    const double v = std::pow(10.0, 2.0 * uniform_open(rng) - 1.0);
    const double base = h(u, v);
    for (double g : gammas) worst = std::max(worst, std::abs(h(g * u, g * v) / h(g, g) - base));
  }
  return worst;
}

double scaling_check(const LevyCopula& c, std::span<const double> gammas, int pairs = 64,
                     std::uint64_t seed = 7);

/// Law of the signal jump z1 given an observed jump z2:
/// nu_{1,z2}(dz1) = h(U1(z1), U2(z2)) nu1(dz1).
///
/// Stored as a cumulative table on 2048 log-spaced nodes plus the origin.
/// Cumulative masses are exact: the substitution u1 = U1(z1) turns the
/// integral of h(U1, u2) f1 into a difference of dH/du2. Within a segment the
/// density is taken as uniform. The raw mass dH/du2(U1(0+), u2) need not be
/// one; sampling and the characteristic function use the normalised law.
class ConditionalJumpLaw {
 public:
  static constexpr std::size_t kNodes = 2048;

  ConditionalJumpLaw(const LevyCopula& c, const LevyMeasure& m1, double u2, double z2);

  double z2() const { return z2_; }
  double u2() const { return u2_; }
  /// Total mass of nu_{1,z2} before normalisation.
  double raw_mass() const { return mass_; }
  bool point_mass() const { return point_; }
  /// Location of the atom for complete dependence.
  double atom() const { return atom_; }

  /// Unnormalised density h(U1(z1), u2) f1(z1) (Clayton only).
  double density(double z1) const;
  /// Normalised cumulative distribution function.
  double cdf(double z1) const;
  /// Normalised quantile function of the tabulated law.
  double quantile(double u) const;
  /// Exact quantile by inverting u -> dH/du2 in closed form and then U1;
  /// agrees with quantile() up to the table interpolation.
  double exact_quantile(double u) const;
  double mean() const;
  /// E exp(i xi Z1) under the normalised law.
  std::complex<double> characteristic(double xi) const;

  std::span<const double> nodes() const { return z_; }
  std::span<const double> cumulative() const { return cum_; }

  template <std::uniform_random_bit_generator G>
  double sample(G& rng) const {
    return exact_quantile(uniform_open(rng));
  }

 private:
  LevyCopula copula_;
  LevyMeasure m1_;
  double z2_ = 0.0;
  double u2_ = 0.0;
  double mass_ = 0.0;
  bool point_ = false;
  double atom_ = 0.0;
  std::vector<double> z_;    // z_0 = 0 < z_1 < ... < z_n
  std::vector<double> cum_;  // raw cumulative mass at z_k; cum_.back() = mass_
};

/// Builds nu_{1,z2}. Throws UnsupportedError for the independence copula or
/// sign_weight != 1, RangeError when z2 lies outside (0, table_hi(m2)].
ConditionalJumpLaw conditional_law(const LevyCopula& c, const LevyMeasure& m1,
                                   const LevyMeasure& m2, double z2);

/// Exact normalised quantile of nu_{1,z2} at level u for u2 = U2(z2),
/// without building a table. Clayton and complete dependence only.
double conditional_quantile(const LevyCopula& c, const LevyMeasure& m1, double u2, double u);

}  // namespace levyfilter
