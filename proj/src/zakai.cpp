#include "levyfilter/zakai.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyfilter/errors.hpp"
#include "levyfilter/symbols.hpp"

namespace levyfilter {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

Grid::Grid(double half_width_, std::size_t n_) : half_width(half_width_), n(n_) {
  if (!(half_width > 0.0)) throw DomainError("grid half-width must be positive");
  if (!is_power_of_two(n)) throw DomainError("grid size must be a power of two");
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx();
}

double GridDensity::mean() const {
  double s = 0.0;
  double m = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    s += values[j];
    m += grid.x(j) * values[j];
  }
  return m / s;
}

double GridDensity::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += f(grid.x(j)) * values[j];
  return s * grid.dx();
}

GridDensity init_density(const InitialLaw& law, const Grid& grid) {
  const double L = grid.half_width;
  const double leak = 1.0 - law.mass_inside(-L, L);
  if (leak > 1e-8) {
    double suggested = L;
    while (1.0 - law.mass_inside(-suggested, suggested) > 1e-8 && suggested < 1e12) suggested *= 1.25;
    std::ostringstream os;
    os << "initial law leaks " << leak << " of its mass outside [-" << L << ", " << L
       << "); use a half-width of at least " << suggested;
    throw DomainError(os.str());
  }
  GridDensity d{grid, std::vector<double>(grid.n)};
  for (std::size_t j = 0; j < grid.n; ++j) d.values[j] = law.pdf(grid.x(j));
  const double m = d.mass();
  if (!(m > 0.0)) throw DomainError("initial law has no mass on the grid points");
  for (double& v : d.values) v /= m;
  return d;
}

double threshold_prob(const GridDensity& pi, double a) {
  const Grid& g = pi.grid;
  const double dx = g.dx();
  const std::size_t n = g.n;
  if (a <= g.x(0)) return 1.0;
  if (a >= g.x(n - 1)) return 0.0;
  const std::size_t j = std::min(static_cast<std::size_t>((a - g.x(0)) / dx), n - 2);
  // Piecewise-linear density: exact integral of the partial cell [a, x_{j+1}],
  // then trapezoid cells to the right.
  const double w = (a - g.x(j)) / dx;
  const double pa = pi.values[j] + w * (pi.values[j + 1] - pi.values[j]);
  double s = 0.5 * (1.0 - w) * dx * (pa + pi.values[j + 1]);
  for (std::size_t k = j + 1; k + 1 < n; ++k) s += 0.5 * dx * (pi.values[k] + pi.values[k + 1]);
  return std::clamp(s, 0.0, 1.0);
}

Normalized normalize(const GridDensity& rho) {
  const double m = rho.mass();
  if (!(m > 1e-300))
    throw DegeneracyError("filter mass underflowed; rescale the unnormalised density more often");
  Normalized out{rho, m};
  for (double& v : out.pi.values) v /= m;
  return out;
}

// ---------------------------------------------------------------------------

ZakaiSolver::ZakaiSolver(const ModelSpec& model, Grid grid, double dt, ZakaiOptions opts)
    : model_(model), grid_(grid), dt_(dt), opts_(opts), fft_(grid.n) {
  model.validate();
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!is_power_of_two(grid.n)) throw DomainError("grid size must be a power of two");
  model_.sensor_bound(grid.half_width);
  spectral_drift_ = model.drift.is_constant();
  const std::size_t m = fft_.spectrum_size();
  psi_.resize(m);
  spec_.resize(m);
  for (std::size_t k = 0; k < m; ++k) psi_[k] = generator_symbol(grid.frequency(k));
  if (!spectral_drift_) {
    drift_.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) drift_[j] = model.drift(grid.x(j) + 0.5 * grid.dx());
  }
  build_multiplier(dt);
}

ZakaiSolver::~ZakaiSolver() = default;
ZakaiSolver::ZakaiSolver(ZakaiSolver&&) noexcept = default;

std::complex<double> ZakaiSolver::generator_symbol(double xi) const {
  std::complex<double> psi = 0.0;
  if (opts_.brownian_symbol) {
    psi += -0.5 * xi * xi;
  } else if (model_.l0) {
    psi += truncated_symbol(*model_.l0, model_.epsilon, xi);
  }
  if (model_.signal_only_rate() > 0.0) psi += truncated_symbol(model_.nu1, model_.epsilon, xi);
  if (spectral_drift_) psi += std::complex<double>(0.0, model_.drift(0.0) * xi);
  return psi;
}

void ZakaiSolver::build_multiplier(double dt) {
  multiplier_.resize(psi_.size());
  for (std::size_t k = 0; k < psi_.size(); ++k) multiplier_[k] = std::exp(dt * std::conj(psi_[k]));
  multiplier_dt_ = dt;
}

ZakaiState ZakaiSolver::initial_state() const { return make_state(init_density(model_.x0, grid_)); }

ZakaiState ZakaiSolver::make_state(GridDensity rho) const {
  if (rho.grid.n != grid_.n || rho.grid.half_width != grid_.half_width)
    throw DomainError("density grid does not match the solver grid");
  ZakaiState s;
  s.rho = std::move(rho);
  return s;
}

void ZakaiSolver::transport(std::vector<double>& rho, double duration) const {
  if (spectral_drift_ || duration == 0.0) return;
  const std::size_t n = grid_.n;
  const double dx = grid_.dx();
  double bmax = 0.0;
  for (double b : drift_) bmax = std::max(bmax, std::abs(b));
  if (bmax == 0.0) return;
  const int sub = std::max(1, static_cast<int>(std::ceil(bmax * duration / (0.8 * dx))));
  const double h = duration / sub;

  std::vector<double> flux(n), k1(n), stage(n);
  auto rhs = [&](const std::vector<double>& r, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jm = (j + n - 1) % n, jp = (j + 1) % n, jpp = (j + 2) % n;
      const double b = drift_[j];
      const double face = b > 0.0 ? (-r[jm] + 5.0 * r[j] + 2.0 * r[jp]) / 6.0
                                  : (2.0 * r[j] + 5.0 * r[jp] - r[jpp]) / 6.0;
      flux[j] = b * face;
    }
    for (std::size_t j = 0; j < n; ++j) out[j] = -(flux[j] - flux[(j + n - 1) % n]) / dx;
  };
  for (int s = 0; s < sub; ++s) {
    rhs(rho, k1);
    for (std::size_t j = 0; j < n; ++j) stage[j] = rho[j] + h * k1[j];
    rhs(stage, k1);
    for (std::size_t j = 0; j < n; ++j) stage[j] = 0.75 * rho[j] + 0.25 * (stage[j] + h * k1[j]);
    rhs(stage, k1);
    for (std::size_t j = 0; j < n; ++j)
      rho[j] = rho[j] / 3.0 + 2.0 / 3.0 * (stage[j] + h * k1[j]);
  }
}

void ZakaiSolver::step_semigroup(ZakaiState& s) { step_semigroup(s, dt_); }

void ZakaiSolver::step_semigroup(ZakaiState& s, double dt) {
  if (dt < 0.0) throw DomainError("time step must be nonnegative");
  if (dt == 0.0) return;
  transport(s.rho.values, 0.5 * dt);
  if (dt != multiplier_dt_) build_multiplier(dt);
  fft_.forward(s.rho.values, spec_);
  for (std::size_t k = 0; k < spec_.size(); ++k) spec_[k] *= multiplier_[k];
  fft_.inverse(spec_, s.rho.values);
  transport(s.rho.values, 0.5 * dt);
  s.t += dt;
}

void ZakaiSolver::step_observation(ZakaiState& s, double dYc, double dt) const {
  if (model_.sensor.is_zero()) return;
  for (std::size_t j = 0; j < grid_.n; ++j) {
    const double g = model_.sensor(grid_.x(j));
    s.rho.values[j] *= std::exp(g * dYc - 0.5 * g * g * dt);
  }
}

void ZakaiSolver::step_jump(ZakaiState& s, double z2) {
  if (!model_.common_jumps()) return;  // observed jumps carry no signal jump
  step_jump(s, conditional_law(model_.copula, model_.nu1, model_.nu2, z2));
}

void ZakaiSolver::step_jump(ZakaiState& s, const ConditionalJumpLaw& law) {
  if (std::abs(law.raw_mass() - 1.0) > opts_.unit_mass_tol) ++s.mass_warnings;
  if (!(law.raw_mass() > 1e-12))
    throw DegeneracyError("conditional jump law has negligible mass: mark is effectively independent");
  fft_.forward(s.rho.values, spec_);
  for (std::size_t k = 0; k < spec_.size(); ++k)
    spec_[k] *= std::conj(law.characteristic(grid_.frequency(k)));
  fft_.inverse(spec_, s.rho.values);
}

void ZakaiSolver::clip(ZakaiState& s) const {
  if (!opts_.clip_negative) return;
  auto& v = s.rho.values;
  const double vmax = *std::max_element(v.begin(), v.end());
  double before = 0.0;
  bool any = false;
  bool large = false;
  for (double x : v) before += x;
  for (double& x : v) {
    if (x < 0.0) {
      if (x < -opts_.clip_tol * vmax) large = true;
      x = 0.0;
      any = true;
    }
  }
  if (!any) return;
  double after = 0.0;
  for (double x : v) after += x;
  if (after > 0.0 && before > 0.0) {
    const double f = before / after;
    for (double& x : v) x *= f;
  }
  ++s.renorm_count;
  if (large) ++s.clip_warnings;
}

void ZakaiSolver::rescale_if_needed(ZakaiState& s) const {
  const double m = s.rho.mass();
  if (!(m > 0.0)) throw DegeneracyError("filter mass vanished");
  if (m > opts_.rescale_band || m < 1.0 / opts_.rescale_band) {
    for (double& v : s.rho.values) v /= m;
    s.log_scale += std::log(m);
    ++s.renorm_count;
  }
}

FilterOutput ZakaiSolver::run(const PathRecord& path, std::span<const double> thresholds,
                              GridDensity* final_density,
                              const std::function<void(ZakaiState&, std::size_t)>& hook) {
  if (std::abs(path.dt - dt_) > 1e-12 * dt_)
    throw DomainError("path time step does not match the solver time step");
  FilterOutput out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  ZakaiState s = initial_state();
  const auto events = path.events_by_step();

  auto record = [&](double t) {
    const Normalized nz = normalize(s.rho);
    FilterRow row;
    row.t = t;
    row.mean = nz.pi.mean();
    for (double a : thresholds) row.p_exceed.push_back(threshold_prob(nz.pi, a));
    row.xi_log = std::log(nz.xi) + s.log_scale;
    row.mass_renorm_count = s.renorm_count;
    out.rows.push_back(std::move(row));
  };
  record(path.t.front());
  for (std::size_t k = 0; k < path.steps(); ++k) {
    step_observation(s, path.Yc[k + 1] - path.Yc[k], dt_);
    step_semigroup(s);
    for (const auto& e : events[k]) step_jump(s, e.z2);
    clip(s);
    rescale_if_needed(s);
    s.t = path.t[k + 1];
    if (hook) hook(s, k);
    record(path.t[k + 1]);
  }
  out.clip_warnings = s.clip_warnings;
  out.mass_warnings = s.mass_warnings;
  if (final_density) *final_density = normalize(s.rho).pi;
  return out;
}

}  // namespace levyfilter
