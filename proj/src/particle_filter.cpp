#include "levyfilter/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyfilter/errors.hpp"
#include "levyfilter/rng.hpp"

namespace levyfilter {

namespace {

enum StreamTag : std::uint64_t { kInit = 0, kL0 = 1, kSignal = 2, kResample = 3, kJumpBase = 16 };

constexpr std::uint64_t kNoParticle = std::numeric_limits<std::uint64_t>::max();

/// Poisson variate by sequential inversion; fine for the small means of one step.
template <class G>
long poisson_small(double mean, double p0, G& rng) {
  double u = uniform_open(rng);
  long k = 0;
  double p = p0;
  double cdf = p;
  while (u > cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace

double ParticleEnsemble::normalize() {
  double mx = -std::numeric_limits<double>::infinity();
  for (double l : log_weights) mx = std::max(mx, l);
  if (!std::isfinite(mx)) throw DegeneracyError("all particle weights underflowed");
  double s = 0.0;
  for (double l : log_weights) s += std::exp(l - mx);
  const double lse = mx + std::log(s);
  for (double& l : log_weights) l -= lse;
  return lse;
}

double ParticleEnsemble::ess() const {
  double s2 = 0.0;
  for (double l : log_weights) {
    const double w = std::exp(l);
    s2 += w * w;
  }
  return 1.0 / s2;
}

double ParticleEnsemble::expect(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::exp(log_weights[i]) * f(x[i]);
  return s;
}

double ParticleEnsemble::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::exp(log_weights[i]) * x[i];
  return s;
}

double ParticleEnsemble::prob_above(double a) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= a) s += std::exp(log_weights[i]);
  return std::min(s, 1.0);
}

// ---------------------------------------------------------------------------

ParticleFilter::ParticleFilter(const ModelSpec& model, std::size_t particles, double dt,
                               std::uint64_t seed, PfOptions opts)
    : model_(model), n_(particles), dt_(dt), seed_(seed), opts_(opts) {
  model.validate();
  if (particles == 0) throw DomainError("particle count must be positive");
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!model.sensor.bounded()) throw DomainError("sensor g is unbounded");
  if (model.l0) l0_rate_ = model.l0->truncated_mass(model.epsilon);
  signal_rate_ = model.signal_only_rate();
}

ParticleEnsemble ParticleFilter::initial() const {
  ParticleEnsemble e;
  e.x.resize(n_);
  e.log_weights.assign(n_, -std::log(static_cast<double>(n_)));
  for (std::size_t i = 0; i < n_; ++i) {
    StreamRng rng(seed_, i, 0, kInit);
    e.x[i] = model_.x0.sample(rng);
  }
  return e;
}

std::vector<double> ParticleFilter::draw_L0_increments(std::size_t step) const {
  std::vector<double> inc(n_, 0.0);
  if (!model_.l0 || l0_rate_ <= 0.0) return inc;
  const double mean = l0_rate_ * dt_;
  const double p0 = std::exp(-mean);
  for (std::size_t i = 0; i < n_; ++i) {
    StreamRng rng(seed_, i, step + 1, kL0);
    const long k = poisson_small(mean, p0, rng);
    double s = 0.0;
    for (long j = 0; j < k; ++j) s += model_.l0->sample_jump_size(model_.epsilon, rng);
    inc[i] = s;
  }
  return inc;
}

void ParticleFilter::propagate(ParticleEnsemble& ens, std::size_t step,
                               std::span<const double> dl0) const {
  if (dl0.size() != ens.size()) throw DomainError("one L0 increment per particle is required");
  const double mean = signal_rate_ * dt_;
  const double p0 = std::exp(-mean);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    double x = ens.x[i] + model_.drift(ens.x[i]) * dt_ + dl0[i];
    if (mean > 0.0) {
      StreamRng rng(seed_, i, step + 1, kSignal);
      const long k = poisson_small(mean, p0, rng);
      for (long j = 0; j < k; ++j) x += model_.nu1.sample_jump_size(model_.epsilon, rng);
    }
    if (!std::isfinite(x)) throw SimulationError("non-finite particle position", step + 1);
    ens.x[i] = x;
  }
}

double ParticleFilter::weight_update(ParticleEnsemble& ens, double dYc, double dt) const {
  if (model_.sensor.is_zero()) return 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double g = model_.sensor(ens.x[i]);
    ens.log_weights[i] += g * dYc - 0.5 * g * g * dt;
  }
  return ens.normalize();
}

void ParticleFilter::jump_update(ParticleEnsemble& ens, const ConditionalJumpLaw& law,
                                 std::size_t step, std::size_t event) const {
  for (std::size_t i = 0; i < ens.size(); ++i) {
    StreamRng rng(seed_, i, step + 1, kJumpBase + event);
    ens.x[i] += law.sample(rng);
  }
}

bool ParticleFilter::resample_systematic(ParticleEnsemble& ens, std::size_t step) const {
  return resample_systematic(ens, opts_.resample_threshold, derive_seed(seed_, kNoParticle, step, kResample));
}

bool ParticleFilter::resample_systematic(ParticleEnsemble& ens, double threshold,
                                         std::uint64_t stream) const {
  const std::size_t n = ens.size();
  if (!(ens.ess() < threshold * static_cast<double>(n))) return false;
  StreamRng rng(stream);
  const double u0 = uniform_open(rng) / static_cast<double>(n);
  std::vector<double> out(n);
  double cum = std::exp(ens.log_weights[0]);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u0 + static_cast<double>(i) / static_cast<double>(n);
    while (u > cum && j + 1 < n) cum += std::exp(ens.log_weights[++j]);
    out[i] = ens.x[j];
  }
  ens.x = std::move(out);
  ens.log_weights.assign(n, -std::log(static_cast<double>(n)));
  return true;
}

FilterOutput ParticleFilter::run(const PathRecord& path, std::span<const double> thresholds,
                                 ParticleEnsemble* final_ensemble) const {
  if (std::abs(path.dt - dt_) > 1e-12 * dt_)
    throw DomainError("path time step does not match the filter time step");
  FilterOutput out;
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  out.has_ess = true;
  ParticleEnsemble ens = initial();
  const auto events = path.events_by_step();
  double xi_log = 0.0;
  std::size_t resamples = 0;

  auto record = [&](double t) {
    FilterRow row;
    row.t = t;
    row.mean = ens.mean();
    for (double a : thresholds) row.p_exceed.push_back(ens.prob_above(a));
    row.xi_log = xi_log;
    row.mass_renorm_count = resamples;
    row.ess = ens.ess();
    out.rows.push_back(std::move(row));
  };
  record(path.t.front());
  for (std::size_t k = 0; k < path.steps(); ++k) {
    xi_log += weight_update(ens, path.Yc[k + 1] - path.Yc[k], dt_);
    const double ess = ens.ess();
    if (resample_systematic(ens, k)) ++resamples;
    propagate(ens, k, draw_L0_increments(k));
    if (model_.common_jumps()) {
      for (std::size_t e = 0; e < events[k].size(); ++e) {
        const ConditionalJumpLaw law =
            conditional_law(model_.copula, model_.nu1, model_.nu2, events[k][e].z2);
        if (std::abs(law.raw_mass() - 1.0) > 1e-3) ++out.mass_warnings;
        jump_update(ens, law, k, e);
      }
    }
    record(path.t[k + 1]);
    out.rows.back().ess = ess;
  }
  if (final_ensemble) *final_ensemble = std::move(ens);
  return out;
}

}  // namespace levyfilter
