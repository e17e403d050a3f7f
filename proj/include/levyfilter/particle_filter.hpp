#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levyfilter/filter_output.hpp"
#include "levyfilter/levy_copula.hpp"
#include "levyfilter/model.hpp"
#include "levyfilter/process_sim.hpp"

namespace levyfilter {

/// Weighted particles; log_weights are kept normalised (sum of exp = 1).
struct ParticleEnsemble {
  std::vector<double> x;
  std::vector<double> log_weights;

  std::size_t size() const { return x.size(); }
  /// Renormalises the log-weights and returns log of their previous sum.
  /// Throws DegeneracyError when every weight underflowed.
  double normalize();
  double ess() const;
  /// Weighted average of f; weights must be normalised.
  double expect(const std::function<double(double)>& f) const;
  double mean() const;
  double prob_above(double a) const;
};

struct PfOptions {
  double resample_threshold = 0.5;
};

/// Bootstrap particle filter for the same model as ZakaiSolver.
///
/// Per step: reweight by exp(g dYc - g^2 dt / 2) at the current positions,
/// propagate by Euler-Maruyama with independent L0 increments (and unobserved
/// signal jumps for the independence copula), move every particle by an
/// independent draw from the normalised conditional law of each observed
/// jump, then resample systematically when ESS < threshold * N.
///
/// Random streams are derived from (seed, particle, step), so results do not
/// depend on evaluation order.
class ParticleFilter {
 public:
  ParticleFilter(const ModelSpec& model, std::size_t particles, double dt, std::uint64_t seed,
                 PfOptions opts = {});

  std::size_t particles() const { return n_; }

  ParticleEnsemble initial() const;
  /// L0 increment (truncated at epsilon) of every particle over `step`.
  std::vector<double> draw_L0_increments(std::size_t step) const;
  void propagate(ParticleEnsemble& ens, std::size_t step, std::span<const double> dl0) const;
  /// Returns log of the mean incremental weight.
  double weight_update(ParticleEnsemble& ens, double dYc, double dt) const;
  void jump_update(ParticleEnsemble& ens, const ConditionalJumpLaw& law, std::size_t step,
                   std::size_t event) const;
  /// Systematic resampling when ESS < threshold * N; returns whether it ran.
  bool resample_systematic(ParticleEnsemble& ens, std::size_t step) const;
  bool resample_systematic(ParticleEnsemble& ens, double threshold, std::uint64_t stream) const;

  /// Same output schema as the grid solver plus ESS. `final_ensemble`
  /// receives the ensemble at the horizon.
  FilterOutput run(const PathRecord& path, std::span<const double> thresholds,
                   ParticleEnsemble* final_ensemble = nullptr) const;

 private:
  ModelSpec model_;
  std::size_t n_;
  double dt_;
  std::uint64_t seed_;
  PfOptions opts_;
  double l0_rate_ = 0.0;       // jumps per unit time of truncated L0
  double signal_rate_ = 0.0;   // unobserved signal jumps per unit time
};

}  // namespace levyfilter
