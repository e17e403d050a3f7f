#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "levyfilter/config.hpp"
#include "levyfilter/filter_output.hpp"
#include "levyfilter/model.hpp"
#include "levyfilter/process_sim.hpp"
#include "levyfilter/zakai.hpp"

namespace levyfilter {

/// One time point of a grid-solver vs particle-filter comparison.
struct CompareRow {
  double t = 0.0;
  double mean_zakai = 0.0;
  double mean_pf = 0.0;
  double mean_pf_stderr = 0.0;
  std::vector<double> p_zakai;
  std::vector<double> p_pf;
  std::vector<double> p_pf_stderr;

  double abs_dmean() const { return std::abs(mean_zakai - mean_pf); }
  double abs_dp(std::size_t i) const { return std::abs(p_zakai[i] - p_pf[i]); }
};

struct CompareResult {
  std::vector<double> thresholds;
  std::vector<CompareRow> rows;
  FilterOutput zakai;
};

struct CompareSettings {
  std::size_t particles = 10000;
  std::size_t replicates = 8;
  double resample_threshold = 0.5;
  std::uint64_t seed = 0;
  /// Worker threads for the replicates; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Runs the grid solver once and the particle filter with `replicates`
/// independent seeds on the same path. PF columns are replicate averages;
/// stderr is the replicate standard deviation over sqrt(R).
CompareResult compare_engines(const ModelSpec& model, const PathRecord& path, const Grid& grid,
                              const std::vector<double>& thresholds, const CompareSettings& s);

void write_compare_csv(std::ostream& os, const CompareResult& r);

/// Seed of PF replicate r.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r);

// CLI commands. Each writes its data to `out` ("-" for standard output) and
// throws on any module error.

/// Writes one path CSV, or `paths` files <stem>_<i>.csv when sim.paths > 1.
void cmd_simulate(const RunConfig& cfg, const std::string& out);
void cmd_filter(const RunConfig& cfg, const std::string& path_csv, const std::string& out);
void cmd_compare(const RunConfig& cfg, const std::string& path_csv, const std::string& out);
/// Columns xi, re_psi, im_psi of the L0 symbol, then re_phi_<z>, im_phi_<z>
/// for each z of symbol.z.
void cmd_symbol(const RunConfig& cfg, const std::string& out);
/// Human-readable report followed by `condition=<name> pass=<0|1>` lines.
/// Returns the overall verdict.
bool cmd_check(const RunConfig& cfg, std::ostream& os);

}  // namespace levyfilter
