#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace levyfilter {

struct FilterRow {
  double t = 0.0;
  double mean = 0.0;
  /// P(X(t) > a) for each configured threshold a.
  std::vector<double> p_exceed;
  /// log xi(t), the log of the unnormalised total mass.
  double xi_log = 0.0;
  /// Running count of mass renormalisations (grid) or resampling events (particles).
  std::size_t mass_renorm_count = 0;
  /// Effective sample size; particle filter only.
  double ess = 0.0;
};

/// Time series produced by either filter engine.
struct FilterOutput {
  std::vector<double> thresholds;
  std::vector<FilterRow> rows;
  bool has_ess = false;
  /// Steps where negative values beyond the clipping tolerance appeared.
  std::size_t clip_warnings = 0;
  /// Observed jumps whose conditional law had raw mass far from one.
  std::size_t mass_warnings = 0;

  /// Row whose time is closest to t.
  const FilterRow& at(double t) const;
};

/// Column name for a threshold, e.g. p_exceed_0.5.
std::string threshold_column(double a);

/// CSV: t,mean,p_exceed_<a>...,xi_log,mass_renorm_count[,ess]
void write_filter_csv(std::ostream& os, const FilterOutput& out);
FilterOutput read_filter_csv(std::istream& is);

}  // namespace levyfilter
