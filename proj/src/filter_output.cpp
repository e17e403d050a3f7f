#include "levyfilter/filter_output.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "levyfilter/errors.hpp"

namespace levyfilter {

const FilterRow& FilterOutput::at(double t) const {
  if (rows.empty()) throw DomainError("filter output is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::abs(rows[i].t - t) < std::abs(rows[best].t - t)) best = i;
  return rows[best];
}

std::string threshold_column(double a) {
  std::ostringstream os;
  os << "p_exceed_" << std::setprecision(10) << a;
  return os.str();
}

void write_filter_csv(std::ostream& os, const FilterOutput& out) {
  os << "t,mean";
  for (double a : out.thresholds) os << ',' << threshold_column(a);
  os << ",xi_log,mass_renorm_count";
  if (out.has_ess) os << ",ess";
  os << '\n' << std::setprecision(17);
  for (const auto& r : out.rows) {
    os << r.t << ',' << r.mean;
    for (double p : r.p_exceed) os << ',' << p;
    os << ',' << r.xi_log << ',' << r.mass_renorm_count;
    if (out.has_ess) os << ',' << r.ess;
    os << '\n';
  }
}

FilterOutput read_filter_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("filter CSV is empty");
  std::vector<std::string> head;
  {
    std::istringstream hs(line);
    std::string f;
    while (std::getline(hs, f, ',')) head.push_back(f);
  }
  FilterOutput out;
  if (head.size() < 4 || head[0] != "t" || head[1] != "mean")
    throw DomainError("filter CSV header must start with t,mean");
  out.has_ess = head.back() == "ess";
  const std::size_t tail = out.has_ess ? 3 : 2;
  for (std::size_t i = 2; i + tail < head.size(); ++i) {
    if (head[i].rfind("p_exceed_", 0) != 0) throw DomainError("unexpected column " + head[i]);
    out.thresholds.push_back(std::stod(head[i].substr(9)));
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(ls, f, ',')) v.push_back(std::stod(f));
    if (v.size() != head.size()) throw DomainError("filter CSV row has wrong field count");
    FilterRow r;
    r.t = v[0];
    r.mean = v[1];
    r.p_exceed.assign(v.begin() + 2, v.begin() + 2 + static_cast<long>(out.thresholds.size()));
    const std::size_t k = 2 + out.thresholds.size();
    r.xi_log = v[k];
    r.mass_renorm_count = static_cast<std::size_t>(v[k + 1]);
    if (out.has_ess) r.ess = v[k + 2];
    out.rows.push_back(std::move(r));
  }
  return out;
}

}  // namespace levyfilter
