#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "levyfilter/fft.hpp"
#include "levyfilter/filter_output.hpp"
#include "levyfilter/levy_copula.hpp"
#include "levyfilter/model.hpp"
#include "levyfilter/process_sim.hpp"

namespace levyfilter {

/// Periodic grid x_j = -L + j dx on [-L, L), dx = 2L / n, n a power of two.
struct Grid {
  double half_width = 20.0;
  std::size_t n = 1024;

  Grid() = default;
  Grid(double half_width, std::size_t n);

  double dx() const { return 2.0 * half_width / static_cast<double>(n); }
  double x(std::size_t j) const { return -half_width + static_cast<double>(j) * dx(); }
  /// Angular frequency of FFT bin k = 0..n/2.
  double frequency(std::size_t k) const { return M_PI * static_cast<double>(k) / half_width; }
};

bool is_power_of_two(std::size_t n);

struct GridDensity {
  Grid grid;
  std::vector<double> values;

  double mass() const;
  double mean() const;
  /// sum_j f(x_j) values_j dx
  double integrate(const std::function<double(double)>& f) const;
};

/// Samples the initial law on the grid and normalises to unit mass. Throws
/// DomainError naming a sufficient half-width when more than 1e-8 of the mass
/// lies outside [-L, L].
GridDensity init_density(const InitialLaw& law, const Grid& grid);

/// P(X >= a): cell sum above a plus the linearly interpolated part of the cell
/// containing a.
double threshold_prob(const GridDensity& pi, double a);

struct Normalized {
  GridDensity pi;
  double xi = 0.0;
};

/// Kallianpur-Striebel normalisation pi = rho / rho(1). Throws
/// DegeneracyError when the mass is not above 1e-300.
Normalized normalize(const GridDensity& rho);

struct ZakaiOptions {
  /// Replace the L0 symbol by -xi^2/2 (Brownian surrogate), for testing.
  bool brownian_symbol = false;
  /// Negative values above -clip_tol * max are zeroed silently.
  double clip_tol = 1e-10;
  bool clip_negative = true;
  /// Warn when the raw conditional-law mass differs from one by more than this.
  double unit_mass_tol = 1e-3;
  /// Keep the mass in [1/rescale_band, rescale_band] by rescaling.
  double rescale_band = 1e6;
};

/// Unnormalised filter density and its bookkeeping.
struct ZakaiState {
  GridDensity rho;
  double t = 0.0;
  /// log of the factor removed by rescaling; log xi = log mass + log_scale.
  double log_scale = 0.0;
  std::size_t renorm_count = 0;
  std::size_t clip_warnings = 0;
  std::size_t mass_warnings = 0;

  double xi_log() const { return std::log(rho.mass()) + log_scale; }
};

/// Spectral solver for the Zakai equation on a periodic grid.
///
/// One time step of length dt, for observation increment dYc and observed
/// jumps z2 at the end of the step:
///   1. rho <- rho * exp(g dYc - g^2 dt / 2)             (pointwise)
///   2. transport dt/2, Fourier multiplier exp(dt conj psi_A), transport dt/2
///   3. for each z2: multiply the spectrum by conj E exp(i xi Z1 | z2)
/// psi_A collects the eps-truncated L0 symbol, the symbol of unobserved
/// signal jumps (independence copula) and a constant drift i b xi. A
/// state-dependent drift is handled by the transport sub-steps, which solve
/// d rho/dt = -d(b rho)/dx with a third-order upwind-biased flux and SSP-RK3.
class ZakaiSolver {
 public:
  ZakaiSolver(const ModelSpec& model, Grid grid, double dt, ZakaiOptions opts = {});
  ~ZakaiSolver();
  ZakaiSolver(ZakaiSolver&&) noexcept;
  ZakaiSolver& operator=(ZakaiSolver&&) = delete;

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  const ZakaiOptions& options() const { return opts_; }

  ZakaiState initial_state() const;
  ZakaiState make_state(GridDensity rho) const;

  /// Semigroup of the signal over one step of the configured dt.
  void step_semigroup(ZakaiState& s);
  /// Semigroup over an arbitrary duration (dt = 0 is the identity).
  void step_semigroup(ZakaiState& s, double dt);
  void step_observation(ZakaiState& s, double dYc, double dt) const;
  void step_jump(ZakaiState& s, double z2);
  void step_jump(ZakaiState& s, const ConditionalJumpLaw& law);
  /// Zeroes small negative values and restores the pre-clip mass.
  void clip(ZakaiState& s) const;
  /// Rescales rho to unit mass when it leaves the configured band.
  void rescale_if_needed(ZakaiState& s) const;

  /// Symbol psi_A at angular frequency xi (without the drift transport).
  std::complex<double> generator_symbol(double xi) const;

  /// Runs over the whole path. Rows are recorded at t = 0 and after every
  /// step. When `final_density` is given it receives the normalised density at
  /// the horizon. `hook` is called after every step.
  FilterOutput run(const PathRecord& path, std::span<const double> thresholds,
                   GridDensity* final_density = nullptr,
                   const std::function<void(ZakaiState&, std::size_t)>& hook = {});

 private:
  void build_multiplier(double dt);
  void transport(std::vector<double>& rho, double duration) const;

  ModelSpec model_;
  Grid grid_;
  double dt_;
  ZakaiOptions opts_;
  RealFft fft_;
  std::vector<std::complex<double>> psi_;         // psi_A(xi_k), k = 0..n/2
  std::vector<std::complex<double>> multiplier_;  // exp(dt conj psi_A)
  double multiplier_dt_ = -1.0;
  std::vector<std::complex<double>> spec_;
  std::vector<double> drift_;       // b at faces x_{j+1/2}
  bool spectral_drift_ = true;
};

}  // namespace levyfilter
