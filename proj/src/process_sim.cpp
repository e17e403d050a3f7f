#include "levyfilter/process_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "levyfilter/errors.hpp"

namespace levyfilter {

namespace {

template <class Ev>
void sort_by_time(std::vector<Ev>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Ev& a, const Ev& b) { return a.t < b.t; });
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("path CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

std::size_t PathRecord::step_of(double s) const {
  const std::size_t n = steps();
  if (n == 0) return 0;
  const double k = std::ceil(s / dt - 1e-9) - 1.0;
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), n - 1);
}

std::vector<std::vector<JumpEvent>> PathRecord::events_by_step() const {
  std::vector<std::vector<JumpEvent>> out(steps());
  for (const auto& e : events) out[step_of(e.t)].push_back(e);
  return out;
}

std::size_t grid_steps(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("horizon and step must be positive");
  const double r = T / dt;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, n))
    throw DomainError("dt must divide T");
  return static_cast<std::size_t>(n);
}

std::vector<JumpEvent> simulate_coupled_jumps(const ModelSpec& model, double T, Rng& rng) {
  if (!(T > 0.0)) throw DomainError("horizon must be positive");
  const double rate = model.observed_jump_rate();
  std::poisson_distribution<long> count(rate * T);
  const long n = rate > 0.0 ? count(rng) : 0;
  std::vector<JumpEvent> ev(static_cast<std::size_t>(n));
  for (auto& e : ev) e.t = T * uniform_open(rng);
  sort_by_time(ev);
  for (auto& e : ev) {
    e.z2 = model.nu2.sample_jump_size(model.epsilon, rng);
    if (model.common_jumps())
      e.z1 = conditional_quantile(model.copula, model.nu1, model.nu2.positive_tail(e.z2),
                                  uniform_open(rng));
  }
  return ev;
}

std::vector<JumpEvent> simulate_signal_only_jumps(const ModelSpec& model, double T, Rng& rng) {
  const double rate = model.signal_only_rate();
  if (!(rate > 0.0)) return {};
  std::poisson_distribution<long> count(rate * T);
  std::vector<JumpEvent> ev(static_cast<std::size_t>(count(rng)));
  for (auto& e : ev) e.t = T * uniform_open(rng);
  sort_by_time(ev);
  for (auto& e : ev) e.z1 = model.nu1.sample_jump_size(model.epsilon, rng);
  return ev;
}

std::vector<TimedJump> simulate_L0_jumps(const LevyMeasure& l0, double T, double eps, Rng& rng) {
  if (!(eps > 0.0) && !l0.finite_activity()) throw DomainError("truncation level must be positive");
  std::poisson_distribution<long> count(l0.truncated_mass(eps) * T);
  std::vector<TimedJump> out(static_cast<std::size_t>(count(rng)));
  for (auto& j : out) j.t = T * uniform_open(rng);
  sort_by_time(out);
  for (auto& j : out) j.z = l0.sample_jump_size(eps, rng);
  return out;
}

std::vector<double> L0_increments(const std::vector<TimedJump>& jumps, std::size_t steps, double dt,
                                  double eps_keep) {
  std::vector<double> inc(steps, 0.0);
  if (steps == 0) return inc;
  for (const auto& j : jumps) {
    if (!(std::abs(j.z) > eps_keep)) continue;
    const double k = std::ceil(j.t / dt - 1e-9) - 1.0;
    const std::size_t s = k <= 0.0 ? 0 : std::min(static_cast<std::size_t>(k), steps - 1);
    inc[s] += j.z;
  }
  return inc;
}

std::vector<double> simulate_L0(const std::optional<LevyMeasure>& l0, double T, double dt,
                                double eps, Rng& rng) {
  const std::size_t n = grid_steps(T, dt);
  if (!l0) return std::vector<double>(n, 0.0);
  return L0_increments(simulate_L0_jumps(*l0, T, eps, rng), n, dt, eps);
}

std::vector<double> brownian_increments(std::size_t steps, double dt, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  std::vector<double> dw(steps);
  for (auto& v : dw) v = normal(rng);
  return dw;
}

std::vector<double> simulate_state(const ModelSpec& model, double T, double dt, double x0,
                                   const std::vector<JumpEvent>& events,
                                   const std::vector<JumpEvent>& signal_jumps,
                                   const std::vector<double>& l0_increments) {
  const std::size_t n = grid_steps(T, dt);
  if (!l0_increments.empty() && l0_increments.size() != n)
    throw DomainError("L0 increments do not match the time grid");
  std::vector<double> jumps(n, 0.0);
  auto add = [&](const std::vector<JumpEvent>& v) {
    for (const auto& e : v) {
      const double k = std::ceil(e.t / dt - 1e-9) - 1.0;
      const std::size_t s = k <= 0.0 ? 0 : std::min(static_cast<std::size_t>(k), n - 1);
      jumps[s] += e.z1;
    }
  };
  add(events);
  add(signal_jumps);
  std::vector<double> X(n + 1);
  X[0] = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const double l0 = l0_increments.empty() ? 0.0 : l0_increments[k];
    X[k + 1] = X[k] + model.drift(X[k]) * dt + l0 + jumps[k];
    if (!std::isfinite(X[k + 1])) throw SimulationError("non-finite signal state", k + 1);
  }
  return X;
}

void simulate_observation(const ModelSpec& model, double dt, const std::vector<double>& X,
                          const std::vector<JumpEvent>& events, const std::vector<double>& dW,
                          std::vector<double>& Y, std::vector<double>& Yc) {
  const std::size_t n = dW.size();
  if (X.size() != n + 1) throw DomainError("state path and Brownian increments disagree in length");
  Yc.assign(n + 1, 0.0);
  Y.assign(n + 1, 0.0);
  std::vector<double> jumps(n, 0.0);
  for (const auto& e : events) {
    const double k = std::ceil(e.t / dt - 1e-9) - 1.0;
    const std::size_t s = k <= 0.0 ? 0 : std::min(static_cast<std::size_t>(k), n - 1);
    jumps[s] += e.z2;
  }
  double cum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Yc[k + 1] = Yc[k] + model.sensor(X[k]) * dt + dW[k];
    cum += jumps[k];
    Y[k + 1] = Yc[k + 1] + cum;
  }
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  return derive_seed(seed, 0x5041544855ULL, index);
}

PathRecord simulate_path(const ModelSpec& model, double T, double dt, std::uint64_t seed) {
  model.validate();
  const std::size_t n = grid_steps(T, dt);
  Rng x0_rng(derive_seed(seed, 1));
  Rng jump_rng(derive_seed(seed, 2));
  Rng signal_rng(derive_seed(seed, 3));
  Rng l0_rng(derive_seed(seed, 4));
  Rng w_rng(derive_seed(seed, 5));

  PathRecord p;
  p.dt = dt;
  p.seed = seed;
  p.t.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) p.t[k] = static_cast<double>(k) * dt;
  p.events = simulate_coupled_jumps(model, T, jump_rng);
  p.signal_jumps = simulate_signal_only_jumps(model, T, signal_rng);
  const std::vector<double> l0 = simulate_L0(model.l0, T, dt, model.epsilon, l0_rng);
  p.dW = brownian_increments(n, dt, w_rng);
  const double x0 = model.x0.sample(x0_rng);
  p.X = simulate_state(model, T, dt, x0, p.events, p.signal_jumps, l0);
  simulate_observation(model, dt, p.X, p.events, p.dW, p.Y, p.Yc);
  return p;
}

double girsanov_Z(const PathRecord& path, const SensorSpec& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < path.steps(); ++k) {
    const double gx = g(path.X[k]);
    s += gx * path.dW[k] + 0.5 * gx * gx * path.dt;
  }
  return std::exp(-s);
}

void write_path_csv(std::ostream& os, const PathRecord& path) {
  const auto by_step = path.events_by_step();
  os << "t,X,Y,Yc,dW2,jump_flag,z2,z1\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < path.t.size(); ++k) {
    os << path.t[k] << ',' << path.X[k] << ',' << path.Y[k] << ',' << path.Yc[k] << ','
       << (k == 0 ? 0.0 : path.dW[k - 1]) << ',';
    if (k == 0 || by_step[k - 1].empty()) {
      os << "0,,\n";
      continue;
    }
    const auto& ev = by_step[k - 1];
    os << ev.size() << ',';
    for (std::size_t i = 0; i < ev.size(); ++i) os << (i ? ";" : "") << ev[i].z2;
    os << ',';
    for (std::size_t i = 0; i < ev.size(); ++i) os << (i ? ";" : "") << ev[i].z1;
    os << '\n';
  }
}

PathRecord read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("path CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,X,Y,Yc,dW2,jump_flag,z2,z1")
    throw DomainError("path CSV header must be t,X,Y,Yc,dW2,jump_flag,z2,z1");
  PathRecord p;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8)
      throw DomainError("path CSV line " + std::to_string(lineno) + ": expected 8 fields");
    const double t = parse_double(f[0], lineno);
    p.t.push_back(t);
    p.X.push_back(parse_double(f[1], lineno));
    p.Y.push_back(parse_double(f[2], lineno));
    p.Yc.push_back(parse_double(f[3], lineno));
    if (p.t.size() > 1) p.dW.push_back(parse_double(f[4], lineno));
    const double flag = parse_double(f[5], lineno);
    if (flag > 0.0) {
      const auto z2 = split(f[6], ';');
      const auto z1 = split(f[7], ';');
      if (z2.size() != static_cast<std::size_t>(flag) || z1.size() != z2.size())
        throw DomainError("path CSV line " + std::to_string(lineno) + ": jump fields disagree with jump_flag");
      for (std::size_t i = 0; i < z2.size(); ++i)
        p.events.push_back({t, parse_double(z2[i], lineno), parse_double(z1[i], lineno)});
    }
  }
  if (p.t.size() < 2) throw DomainError("path CSV needs at least two rows");
  p.dt = p.t[1] - p.t[0];
  if (!(p.dt > 0.0)) throw DomainError("path CSV times must increase");
  return p;
}

}  // namespace levyfilter
