#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "levyfilter/model.hpp"
#include "levyfilter/rng.hpp"

namespace levyfilter {

/// One jump of the coupled pair. For observed events z2 > 0; for jumps of L1
/// that are invisible in Y (independence copula) z2 = 0.
struct JumpEvent {
  double t = 0.0;
  double z2 = 0.0;
  double z1 = 0.0;
};

/// A jump of the driving noise L0.
struct TimedJump {
  double t = 0.0;
  double z = 0.0;
};

/// One simulated realisation on the uniform grid t_k = k dt, k = 0..n.
struct PathRecord {
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> t;
  std::vector<double> X;
  std::vector<double> Y;
  std::vector<double> Yc;
  /// dW[k] is the Brownian increment over [t_k, t_{k+1}]; dW has n entries.
  std::vector<double> dW;
  /// Observed jumps, sorted by time.
  std::vector<JumpEvent> events;
  /// Unobserved signal jumps (independence copula), sorted by time.
  std::vector<JumpEvent> signal_jumps;

  std::size_t steps() const { return dW.size(); }
  double horizon() const { return t.empty() ? 0.0 : t.back(); }
  /// Grid step whose end carries a jump at time s.
  std::size_t step_of(double s) const;
  /// Observed events grouped by step: result[k] lists events applied at t_{k+1}.
  std::vector<std::vector<JumpEvent>> events_by_step() const;
};

/// Number of grid steps for horizon T; throws DomainError unless dt divides T.
std::size_t grid_steps(double T, double dt);

/// Observed jumps: count ~ Poisson(nu2(z > eps) T), times uniform and sorted,
/// z2 ~ nu2 restricted to z > eps, z1 drawn from the conditional law given z2
/// (zero under the independence copula).
std::vector<JumpEvent> simulate_coupled_jumps(const ModelSpec& model, double T, Rng& rng);

/// Jumps of L1 not seen in Y: nonempty only for the independence copula.
std::vector<JumpEvent> simulate_signal_only_jumps(const ModelSpec& model, double T, Rng& rng);

/// Jumps of |z| > eps of the symmetric measure l0 on [0, T].
std::vector<TimedJump> simulate_L0_jumps(const LevyMeasure& l0, double T, double eps, Rng& rng);

/// Grid increments of the truncated L0 keeping jumps with |z| > eps_keep.
/// The compensator vanishes by symmetry.
std::vector<double> L0_increments(const std::vector<TimedJump>& jumps, std::size_t steps, double dt,
                                  double eps_keep);

/// Grid increments of L0 truncated at eps; all zeros when l0 is empty.
std::vector<double> simulate_L0(const std::optional<LevyMeasure>& l0, double T, double dt,
                                double eps, Rng& rng);

/// Brownian increments N(0, dt).
std::vector<double> brownian_increments(std::size_t steps, double dt, Rng& rng);

/// Euler-Maruyama for X with jumps applied at the end of their step.
/// Throws SimulationError on a non-finite state.
std::vector<double> simulate_state(const ModelSpec& model, double T, double dt, double x0,
                                   const std::vector<JumpEvent>& events,
                                   const std::vector<JumpEvent>& signal_jumps,
                                   const std::vector<double>& l0_increments);

/// Yc_{k+1} = Yc_k + g(X_k) dt + dW_k; Y adds the observed z2.
void simulate_observation(const ModelSpec& model, double dt, const std::vector<double>& X,
                          const std::vector<JumpEvent>& events, const std::vector<double>& dW,
                          std::vector<double>& Y, std::vector<double>& Yc);

/// Full path from a master seed; sub-streams for X0, jumps, L0 and W are
/// derived from the seed so that components are independent of each other.
PathRecord simulate_path(const ModelSpec& model, double T, double dt, std::uint64_t seed);

/// Seed of path number `index` in a batch with master seed `seed`.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// Z(T) = exp(-sum g(X_k) dW_k - 1/2 sum g(X_k)^2 dt).
double girsanov_Z(const PathRecord& path, const SensorSpec& g);

/// CSV with columns t,X,Y,Yc,dW2,jump_flag,z2,z1. jump_flag counts the
/// observed jumps applied at that row; several jumps are ';'-joined.
void write_path_csv(std::ostream& os, const PathRecord& path);
PathRecord read_path_csv(std::istream& is);

}  // namespace levyfilter
