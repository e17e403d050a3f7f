#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "levyfilter/errors.hpp"
#include "levyfilter/model.hpp"
#include "levyfilter/zakai.hpp"

namespace levyfilter {

/// Parameters of one marginal jump measure as written in a config file.
struct MeasureConfig {
  std::string family = "exponential";  // exponential | tempered_stable
  double rate = 2.0;
  double scale = 1.0;
  double beta = 0.5;
  double tempering = 1.0;
  double prefactor = 1.0;
};

/// Everything a run needs, fully validated. Defaults reproduce the
/// benchmark model: b(x) = -x, g(x) = exp(-x^2), exponential margins of rate
/// 2, half-weight Clayton with theta = 2, tempered-stable L0 with alpha = 1.5
/// truncated at 0.05, X0 ~ N(0, 1).
struct RunConfig {
  // model
  std::string drift_kind = "linear";
  double drift_slope = -1.0;
  double drift_intercept = 0.0;
  std::string sensor_kind = "gaussian_bump";
  double sensor_amplitude = 1.0;
  double sensor_center = 0.0;
  double sensor_width = 1.0;
  MeasureConfig nu1;
  MeasureConfig nu2;
  std::string copula_family = "clayton";  // clayton | independence | complete_dependence
  double copula_theta = 2.0;
  bool copula_half_weights = true;
  double copula_sign_weight = 1.0;
  std::string l0_kind = "tempered_stable";  // tempered_stable | none
  double l0_alpha = 1.5;
  double l0_tempering = 1.0;
  double l0_prefactor = 1.0;
  double epsilon = 0.05;
  std::string x0_kind = "gaussian";  // gaussian | uniform
  double x0_mean = 0.0;
  double x0_sd = 1.0;
  double x0_lo = -1.0;
  double x0_hi = 1.0;
  double delta_g = 1.0;
  double rho = 0.5;
  double rho0 = 0.5;
  double beta_plus = 1.0;  // NaN: estimate
  // simulation
  double t = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 20240601;
  bool seed_from_file = false;
  std::size_t paths = 1;
  // grid
  std::size_t grid_n = 1024;
  double grid_l = 20.0;
  // particle filter
  std::size_t pf_particles = 10000;
  double pf_resample_threshold = 0.5;
  std::size_t pf_replicates = 8;
  std::string engine = "zakai";  // zakai | pf
  // outputs
  std::vector<double> thresholds{0.5};
  std::string output_path = "path.csv";
  std::string output_filter = "filter.csv";
  std::string output_compare = "compare.csv";
  std::string output_symbol = "symbol.csv";
  // symbol scan
  double symbol_xi_min = 0.1;
  double symbol_xi_max = 1e5;
  std::size_t symbol_points = 64;
  std::vector<double> symbol_z;
};

/// Name of the environment variable that overrides the default seed.
inline constexpr const char* kSeedEnv = "LEVYFILTER_SEED";

/// Parses flat `key = value` text with `#` comments. Unknown keys, type
/// mismatches and constraint violations throw ConfigError naming key and line.
/// `overrides` are applied after the text, as if given on line 0.
using Override = std::pair<std::string, std::string>;
RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides = {});
RunConfig load_config(const std::string& file, const std::vector<Override>& overrides = {});

/// Documented keys with their defaults, one `key = value` per line.
std::string default_config_text();

ModelSpec build_model(const RunConfig& cfg);
Grid build_grid(const RunConfig& cfg);

}  // namespace levyfilter
