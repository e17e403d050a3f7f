#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "levyfilter/levy_copula.hpp"
#include "levyfilter/levy_measure.hpp"
#include "levyfilter/model.hpp"

namespace levyfilter {

using Complex = std::complex<double>;

/// A Lévy symbol xi -> psi(xi) together with where it came from.
struct SymbolFn {
  std::function<Complex(double)> eval;
  std::string provenance;

  Complex operator()(double xi) const { return eval(xi); }
};

/// int (e^{i xi z} - 1 - i xi z 1{|z|<=1}) nu0(dz) for a symmetric L0 measure.
/// The compensator term cancels by symmetry, so the result is real.
Complex symbol_L0(const LevyMeasure& l0, double xi);

/// int_{|z|>eps} (e^{i xi z} - 1) nu(dz). For symmetric measures this is the
/// symbol of the eps-truncated L0; for positive measures it is the symbol of
/// the compound Poisson process of jumps above eps.
Complex truncated_symbol(const LevyMeasure& m, double eps, double xi);

/// phi_z(xi) = int (e^{i xi z1} - 1) nu_{1,z}(dz1) with the unnormalised
/// conditional measure.
Complex symbol_Bz(const ConditionalJumpLaw& law, double xi);

SymbolFn make_L0_symbol(const LevyMeasure& l0);
SymbolFn make_Bz_symbol(const LevyCopula& c, const LevyMeasure& nu1, const LevyMeasure& nu2,
                        double z2);

enum class IndexDirection { plain, upper, lower };

struct BGIndexReport {
  double estimate = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  double slope_stderr = 0.0;
  IndexDirection direction = IndexDirection::plain;
};

/// Least-squares slope of log|sym| against log xi on `samples` log-spaced
/// frequencies in [xi_lo, xi_hi]. The upper (lower) index is the largest
/// (smallest) slope over sliding sub-windows of a quarter of the samples.
/// Estimates are clamped to [0, 2]. Throws DomainError if |sym| vanishes.
BGIndexReport estimate_bg_index(const std::function<Complex(double)>& sym, double xi_lo = 1e2,
                                double xi_hi = 1e5, IndexDirection direction = IndexDirection::plain,
                                int samples = 64);

struct KSample {
  double z = 0.0;
  double k = 0.0;
};

/// k(z) = max over xi in [xi_lo, xi_hi] of |phi_z(xi)| / xi^beta_plus.
std::vector<KSample> estimate_k(const LevyCopula& c, const LevyMeasure& nu1,
                                const LevyMeasure& nu2, const std::vector<double>& z_grid,
                                double beta_plus, double xi_lo = 10.0, double xi_hi = 1e3,
                                int samples = 64);

/// Power-law fit k(z) = C z^gamma over samples with z <= 1.
struct PowerFit {
  double prefactor = 0.0;
  double exponent = 0.0;
};
PowerFit fit_power_law(const std::vector<KSample>& ks);

struct WellposednessInputs {
  double alpha0_minus = 0.0;
  double beta_plus = 0.0;
  std::vector<KSample> k_samples;
  double delta_g = 0.0;
  double rho = 0.0;
  double rho0 = 0.0;
};

struct ConditionFlag {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct WellposednessReport {
  double alpha0_minus = 0.0;
  double beta_plus = 0.0;
  std::vector<KSample> k_samples;
  PowerFit k_fit;
  double p_chosen = 0.0;  // NaN when no admissible p exists
  double delta_g = 0.0;
  double rho = 0.0;
  double rho0 = 0.0;
  std::vector<ConditionFlag> conditions;
  bool verdict = false;

  const ConditionFlag& condition(const std::string& name) const;
};

/// Searches p in {1.01, 1.02, ..., 2} for
///   beta_plus / alpha0_minus < 1/p,  int_{z<=1} k^p dnu2 < inf,  rho - rho0 < 1/p,
/// and checks delta_g > 1 - alpha0_minus/2 and alpha0_minus > 1.
WellposednessReport check_wellposedness(const WellposednessInputs& in, const LevyMeasure& nu2);

/// Estimates alpha0- from the L0 symbol and k(z) on z in [1e-3, 1], takes
/// beta_plus from the declared exponents (estimated when NaN), and runs the
/// check above.
WellposednessReport check_wellposedness(const ModelSpec& model);

/// Whether int_0^1 z^power nu(dz) is finite, judged from partial integrals
/// over shrinking inner cutoffs.
bool power_moment_finite(const LevyMeasure& m, double power);

}  // namespace levyfilter
