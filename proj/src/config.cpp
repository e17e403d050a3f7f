#include "levyfilter/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <type_traits>
#include <sstream>

namespace levyfilter {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, int line, const std::string& v) {
  if (v == "nan" || v == "estimate") return std::numeric_limits<double>::quiet_NaN();
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || p != last) throw ConfigError(key, line, "expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, int line, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key, line, "expected a nonnegative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, line, "expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, int line, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key, line, "empty entry in list");
    out.push_back(to_double(key, line, item));
  }
  return out;
}

std::string one_of(const std::string& key, int line, const std::string& v,
                   std::initializer_list<const char*> allowed) {
  std::string names;
  for (const char* a : allowed) {
    if (v == a) return v;
    names += names.empty() ? a : std::string(", ") + a;
  }
  throw ConfigError(key, line, "unknown value '" + v + "' (expected one of: " + names + ")");
}

struct Entry {
  std::string value;
  int line;
};

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

template <class T>
Setter num(T RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, int l, const std::string& v) {
    if constexpr (std::is_same_v<T, double>)
      c.*field = to_double(k, l, v);
    else
      c.*field = static_cast<T>(to_uint(k, l, v));
  };
}

Setter measure_num(MeasureConfig RunConfig::*m, double MeasureConfig::*f) {
  return [m, f](RunConfig& c, const std::string& k, int l, const std::string& v) {
    (c.*m).*f = to_double(k, l, v);
  };
}

Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, const std::string&, int, const std::string& v) { c.*field = v; };
}

Setter choice(std::string RunConfig::*field, std::initializer_list<const char*> allowed) {
  std::vector<const char*> names(allowed);
  return [field, names](RunConfig& c, const std::string& k, int l, const std::string& v) {
    for (const char* a : names)
      if (v == a) {
        c.*field = v;
        return;
      }
    std::string all;
    for (const char* a : names) all += all.empty() ? a : std::string(", ") + a;
    throw ConfigError(k, l, "unknown value '" + v + "' (expected one of: " + all + ")");
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["model.drift.kind"] = choice(&RunConfig::drift_kind, {"zero", "constant", "linear"});
    t["model.drift.slope"] = num(&RunConfig::drift_slope);
    t["model.drift.intercept"] = num(&RunConfig::drift_intercept);
    t["model.sensor.kind"] =
        choice(&RunConfig::sensor_kind, {"zero", "constant", "gaussian_bump", "linear"});
    t["model.sensor.amplitude"] = num(&RunConfig::sensor_amplitude);
    t["model.sensor.center"] = num(&RunConfig::sensor_center);
    t["model.sensor.width"] = num(&RunConfig::sensor_width);
    for (auto [name, m] : {std::pair{"nu1", &RunConfig::nu1}, std::pair{"nu2", &RunConfig::nu2}}) {
      const std::string p = std::string("model.") + name + ".";
      t[p + "family"] = [m](RunConfig& c, const std::string& k, int l, const std::string& v) {
        (c.*m).family = one_of(k, l, v, {"exponential", "tempered_stable"});
      };
      t[p + "rate"] = measure_num(m, &MeasureConfig::rate);
      t[p + "scale"] = measure_num(m, &MeasureConfig::scale);
      t[p + "beta"] = measure_num(m, &MeasureConfig::beta);
      t[p + "tempering"] = measure_num(m, &MeasureConfig::tempering);
      t[p + "prefactor"] = measure_num(m, &MeasureConfig::prefactor);
    }
    t["model.copula.family"] =
        choice(&RunConfig::copula_family, {"clayton", "independence", "complete_dependence"});
    t["model.copula.theta"] = num(&RunConfig::copula_theta);
    t["model.copula.half_weights"] = [](RunConfig& c, const std::string& k, int l,
                                        const std::string& v) {
      c.copula_half_weights = to_bool(k, l, v);
    };
    t["model.copula.sign_weight"] = num(&RunConfig::copula_sign_weight);
    t["model.l0.kind"] = choice(&RunConfig::l0_kind, {"tempered_stable", "none"});
    t["model.l0.alpha"] = num(&RunConfig::l0_alpha);
    t["model.l0.tempering"] = num(&RunConfig::l0_tempering);
    t["model.l0.prefactor"] = num(&RunConfig::l0_prefactor);
    t["model.epsilon"] = num(&RunConfig::epsilon);
    t["model.x0.kind"] = choice(&RunConfig::x0_kind, {"gaussian", "uniform"});
    t["model.x0.mean"] = num(&RunConfig::x0_mean);
    t["model.x0.sd"] = num(&RunConfig::x0_sd);
    t["model.x0.lo"] = num(&RunConfig::x0_lo);
    t["model.x0.hi"] = num(&RunConfig::x0_hi);
    t["model.delta_g"] = num(&RunConfig::delta_g);
    t["model.rho"] = num(&RunConfig::rho);
    t["model.rho0"] = num(&RunConfig::rho0);
    t["model.beta_plus"] = num(&RunConfig::beta_plus);
    t["sim.t"] = num(&RunConfig::t);
    t["sim.dt"] = num(&RunConfig::dt);
    t["sim.seed"] = [](RunConfig& c, const std::string& k, int l, const std::string& v) {
      c.seed = to_uint(k, l, v);
      c.seed_from_file = true;
    };
    t["sim.paths"] = num(&RunConfig::paths);
    t["grid.n"] = num(&RunConfig::grid_n);
    t["grid.l"] = num(&RunConfig::grid_l);
    t["pf.particles"] = num(&RunConfig::pf_particles);
    t["pf.resample_threshold"] = num(&RunConfig::pf_resample_threshold);
    t["pf.replicates"] = num(&RunConfig::pf_replicates);
    t["filter.engine"] = choice(&RunConfig::engine, {"zakai", "pf"});
    t["thresholds"] = [](RunConfig& c, const std::string& k, int l, const std::string& v) {
      c.thresholds = to_list(k, l, v);
    };
    t["output.path"] = text(&RunConfig::output_path);
    t["output.filter"] = text(&RunConfig::output_filter);
    t["output.compare"] = text(&RunConfig::output_compare);
    t["output.symbol"] = text(&RunConfig::output_symbol);
    t["symbol.xi_min"] = num(&RunConfig::symbol_xi_min);
    t["symbol.xi_max"] = num(&RunConfig::symbol_xi_max);
    t["symbol.points"] = num(&RunConfig::symbol_points);
    t["symbol.z"] = [](RunConfig& c, const std::string& k, int l, const std::string& v) {
      c.symbol_z = to_list(k, l, v);
    };
    return t;
  }();
  return table;
}

// Parameters that become mandatory once their family is named explicitly.
const std::map<std::string, std::vector<std::string>>& family_params() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"clayton", {"theta"}},
      {"exponential", {"rate"}},
      {"tempered_stable", {"beta"}},
  };
  return m;
}

void validate(const RunConfig& c, const std::map<std::string, Entry>& seen) {
  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second.line;
  };
  auto require = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(key, line_of(key), msg);
  };

  for (const char* block : {"model.nu1", "model.nu2", "model.copula"}) {
    const auto fam = seen.find(std::string(block) + ".family");
    if (fam == seen.end()) continue;
    const auto params = family_params().find(fam->second.value);
    if (params == family_params().end()) continue;
    for (const auto& p : params->second) {
      const std::string key = std::string(block) + "." + p;
      if (!seen.count(key))
        throw ConfigError(key, 0,
                          "missing mandatory key for family '" + fam->second.value + "'");
    }
  }

  require(c.sensor_width > 0.0, "model.sensor.width", "width must be > 0");
  for (auto [name, m] : {std::pair{"model.nu1", &c.nu1}, std::pair{"model.nu2", &c.nu2}}) {
    const std::string p = name;
    require(m->rate > 0.0, p + ".rate", "rate must be > 0");
    require(m->scale > 0.0, p + ".scale", "scale must be > 0");
    require(m->beta > 0.0 && m->beta < 1.0, p + ".beta", "beta must lie in (0, 1)");
    require(m->tempering > 0.0, p + ".tempering", "tempering must be > 0");
    require(m->prefactor > 0.0, p + ".prefactor", "prefactor must be > 0");
  }
  if (c.copula_family == "clayton") {
    require(c.copula_theta > 0.0, "model.copula.theta", "theta must be > 0");
    require(c.copula_sign_weight >= 0.0 && c.copula_sign_weight <= 1.0, "model.copula.sign_weight",
            "sign_weight must lie in [0, 1]");
  }
  if (c.l0_kind != "none") {
    require(c.l0_alpha > 1.0 && c.l0_alpha < 2.0, "model.l0.alpha", "alpha must lie in (1, 2)");
    require(c.l0_tempering > 0.0, "model.l0.tempering", "tempering must be > 0");
    require(c.l0_prefactor > 0.0, "model.l0.prefactor", "prefactor must be > 0");
  }
  require(c.epsilon > 0.0, "model.epsilon", "epsilon must be > 0");
  if (c.x0_kind == "gaussian") require(c.x0_sd > 0.0, "model.x0.sd", "sd must be > 0");
  if (c.x0_kind == "uniform") require(c.x0_hi > c.x0_lo, "model.x0.hi", "hi must exceed lo");
  require(c.delta_g >= 0.0, "model.delta_g", "delta_g must be >= 0");
  require(c.t > 0.0, "sim.t", "T must be > 0");
  require(c.dt > 0.0, "sim.dt", "dt must be > 0");
  require(c.dt <= c.t, "sim.dt", "dt must not exceed T");
  require(c.paths >= 1, "sim.paths", "paths must be >= 1");
  require(is_power_of_two(c.grid_n), "grid.n", "must be a power of two");
  require(c.grid_l > 0.0, "grid.l", "half-width must be > 0");
  require(c.pf_particles >= 1, "pf.particles", "particles must be >= 1");
  require(c.pf_resample_threshold >= 0.0 && c.pf_resample_threshold <= 1.0,
          "pf.resample_threshold", "resample threshold must lie in [0, 1]");
  require(c.pf_replicates >= 2, "pf.replicates", "replicates must be >= 2");
  require(!c.thresholds.empty(), "thresholds", "at least one threshold is required");
  require(c.symbol_xi_min > 0.0 && c.symbol_xi_max > c.symbol_xi_min, "symbol.xi_max",
          "need 0 < xi_min < xi_max");
  require(c.symbol_points >= 2, "symbol.points", "points must be >= 2");
  for (double z : c.symbol_z) require(z > 0.0, "symbol.z", "jump sizes must be > 0");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides) {
  RunConfig cfg;
  if (const char* env = std::getenv(kSeedEnv); env && *env)
    cfg.seed = to_uint(kSeedEnv, 0, trim(env));

  std::map<std::string, Entry> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, line, "expected 'key = value'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "empty key");
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, line, "unknown key");
    if (const auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(key, line,
                        "duplicate key (first set on line " + std::to_string(prev->second.line) + ")");
    if (value.empty()) throw ConfigError(key, line, "missing value");
    it->second(cfg, key, line, value);
    seen[key] = {value, line};
  }
  for (const auto& [key, value] : overrides) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, 0, "unknown key");
    it->second(cfg, key, 0, value);
    seen[key] = {value, 0};
  }
  validate(cfg, seen);
  return cfg;
}

RunConfig load_config(const std::string& file, const std::vector<Override>& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file, 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string default_config_text() {
  const RunConfig c;
  std::ostringstream os;
  auto shortest = [](double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  auto kv = [&](const char* k, const auto& v) {
    os << k << " = ";
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>)
      os << shortest(v);
    else
      os << v;
    os << "\n";
  };
  auto list = [&](const char* k, const std::vector<double>& v) {
    os << k << " = ";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << shortest(v[i]);
    os << "\n";
  };
  kv("model.drift.kind", c.drift_kind);
  kv("model.drift.slope", c.drift_slope);
  kv("model.drift.intercept", c.drift_intercept);
  kv("model.sensor.kind", c.sensor_kind);
  kv("model.sensor.amplitude", c.sensor_amplitude);
  kv("model.sensor.center", c.sensor_center);
  kv("model.sensor.width", c.sensor_width);
  for (auto [name, m] : {std::pair{"nu1", &c.nu1}, std::pair{"nu2", &c.nu2}}) {
    const std::string p = std::string("model.") + name + ".";
    kv((p + "family").c_str(), m->family);
    kv((p + "rate").c_str(), m->rate);
    kv((p + "scale").c_str(), m->scale);
    kv((p + "beta").c_str(), m->beta);
    kv((p + "tempering").c_str(), m->tempering);
    kv((p + "prefactor").c_str(), m->prefactor);
  }
  kv("model.copula.family", c.copula_family);
  kv("model.copula.theta", c.copula_theta);
  kv("model.copula.half_weights", c.copula_half_weights ? "true" : "false");
  kv("model.copula.sign_weight", c.copula_sign_weight);
  kv("model.l0.kind", c.l0_kind);
  kv("model.l0.alpha", c.l0_alpha);
  kv("model.l0.tempering", c.l0_tempering);
  kv("model.l0.prefactor", c.l0_prefactor);
  kv("model.epsilon", c.epsilon);
  kv("model.x0.kind", c.x0_kind);
  kv("model.x0.mean", c.x0_mean);
  kv("model.x0.sd", c.x0_sd);
  kv("model.x0.lo", c.x0_lo);
  kv("model.x0.hi", c.x0_hi);
  kv("model.delta_g", c.delta_g);
  kv("model.rho", c.rho);
  kv("model.rho0", c.rho0);
  kv("model.beta_plus", c.beta_plus);
  kv("sim.t", c.t);
  kv("sim.dt", c.dt);
  kv("sim.seed", c.seed);
  kv("sim.paths", c.paths);
  kv("grid.n", c.grid_n);
  kv("grid.l", c.grid_l);
  kv("pf.particles", c.pf_particles);
  kv("pf.resample_threshold", c.pf_resample_threshold);
  kv("pf.replicates", c.pf_replicates);
  kv("filter.engine", c.engine);
  list("thresholds", c.thresholds);
  kv("output.path", c.output_path);
  kv("output.filter", c.output_filter);
  kv("output.compare", c.output_compare);
  kv("output.symbol", c.output_symbol);
  kv("symbol.xi_min", c.symbol_xi_min);
  kv("symbol.xi_max", c.symbol_xi_max);
  kv("symbol.points", c.symbol_points);
  os << "# symbol.z = 0.1, 1    (jump sizes for phi_z columns; none by default)\n";
  return os.str();
}

namespace {

LevyMeasure build_measure(const MeasureConfig& m) {
  if (m.family == "exponential") return LevyMeasure::exponential(m.rate, m.scale);
  return LevyMeasure::tempered_stable(m.beta, Support::positive_half_line, m.tempering, m.prefactor);
}

}  // namespace

ModelSpec build_model(const RunConfig& c) {
  LevyCopula cop = c.copula_family == "clayton"
                       ? LevyCopula::clayton(c.copula_theta, c.copula_half_weights, c.copula_sign_weight)
                   : c.copula_family == "independence" ? LevyCopula::independence()
                                                       : LevyCopula::complete_dependence();
  ModelSpec m(build_measure(c.nu1), build_measure(c.nu2), cop);
  if (c.drift_kind == "zero")
    m.drift = DriftSpec::zero();
  else if (c.drift_kind == "constant")
    m.drift = DriftSpec::constant(c.drift_intercept);
  else
    m.drift = DriftSpec::linear(c.drift_slope, c.drift_intercept);
  if (c.sensor_kind == "zero")
    m.sensor = SensorSpec::zero();
  else if (c.sensor_kind == "constant")
    m.sensor = SensorSpec::constant(c.sensor_amplitude);
  else if (c.sensor_kind == "gaussian_bump")
    m.sensor = SensorSpec::gaussian_bump(c.sensor_amplitude, c.sensor_center, c.sensor_width);
  else
    m.sensor = SensorSpec::linear(c.sensor_amplitude, c.sensor_center);
  if (c.l0_kind != "none") m.l0 = make_l0(c.l0_alpha, c.l0_tempering, c.l0_prefactor);
  m.epsilon = c.epsilon;
  m.x0 = c.x0_kind == "gaussian" ? InitialLaw::gaussian(c.x0_mean, c.x0_sd)
                                 : InitialLaw::uniform(c.x0_lo, c.x0_hi);
  m.exponents.delta_g = c.delta_g;
  m.exponents.rho = c.rho;
  m.exponents.rho0 = c.rho0;
  m.exponents.beta_plus = c.beta_plus;
  m.validate();
  return m;
}

Grid build_grid(const RunConfig& c) { return Grid(c.grid_l, c.grid_n); }

}  // namespace levyfilter
