#include "levyfilter/levy_measure.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "levyfilter/quadrature.hpp"

namespace levyfilter {

namespace {

constexpr std::size_t kTableNodes = 4096;
constexpr double kTailCut = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_interval(double lo, double hi) {
  std::ostringstream os;
  os.precision(10);
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// TailTable

TailTable::TailTable(std::vector<double> z, std::vector<double> tail, std::vector<double> log_slope)
    : z_(std::move(z)), u_(std::move(tail)), slope_(std::move(log_slope)) {
  const std::size_t n = z_.size();
  logz_.resize(n);
  logu_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    logz_[k] = std::log(z_[k]);
    logu_[k] = std::log(u_[k]);
  }
  // Fritsch-Carlson limiter keeps the interpolant monotone.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double delta = (logu_[k + 1] - logu_[k]) / (logz_[k + 1] - logz_[k]);
    if (delta == 0.0) {
      slope_[k] = slope_[k + 1] = 0.0;
      continue;
    }
    double a = slope_[k] / delta;
    double b = slope_[k + 1] / delta;
    if (a < 0.0) slope_[k] = a = 0.0;
    if (b < 0.0) slope_[k + 1] = b = 0.0;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      slope_[k] = t * a * delta;
      slope_[k + 1] = t * b * delta;
    }
  }
}

std::size_t TailTable::segment_for_z(double logz) const {
  auto it = std::upper_bound(logz_.begin(), logz_.end(), logz);
  std::size_t k = static_cast<std::size_t>(it - logz_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, logz_.size() - 2);
}

std::size_t TailTable::segment_for_u(double logu) const {
  // logu_ is nonincreasing.
  auto it = std::upper_bound(logu_.begin(), logu_.end(), logu, std::greater<>());
  std::size_t k = static_cast<std::size_t>(it - logu_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, logu_.size() - 2);
}

double TailTable::hermite(std::size_t k, double s) const {
  const double h = logz_[k + 1] - logz_[k];
  const double t = (s - logz_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * logu_[k] + (t3 - 2 * t2 + t) * h * slope_[k] +
         (-2 * t3 + 3 * t2) * logu_[k + 1] + (t3 - t2) * h * slope_[k + 1];
}

double TailTable::hermite_deriv(std::size_t k, double s) const {
  const double h = logz_[k + 1] - logz_[k];
  const double t = (s - logz_[k]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * logu_[k] + (-6 * t2 + 6 * t) * logu_[k + 1]) / h +
         (3 * t2 - 4 * t + 1) * slope_[k] + (3 * t2 - 2 * t) * slope_[k + 1];
}

double TailTable::value(double z) const {
  const double s = std::log(z);
  return std::exp(hermite(segment_for_z(s), s));
}

double TailTable::inverse(double u) const {
  const double target = std::log(u);
  const std::size_t k = segment_for_u(target);
  double lo = logz_[k];
  double hi = logz_[k + 1];
  const double ylo = logu_[k];
  const double yhi = logu_[k + 1];
  double s = ylo == yhi ? lo : lo + (hi - lo) * (target - ylo) / (yhi - ylo);
  for (int it = 0; it < 60; ++it) {
    const double r = hermite(k, s) - target;
    if (r > 0.0) lo = s; else hi = s;  // decreasing in s
    const double d = hermite_deriv(k, s);
    double next = d < 0.0 ? s - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s))) {
      s = next;
      break;
    }
    s = next;
  }
  return std::exp(s);
}

// ---------------------------------------------------------------------------
// LevyMeasure construction

LevyMeasure LevyMeasure::exponential(double rate, double scale) {
  if (!(rate > 0.0) || !(scale > 0.0))
    throw DomainError("exponential Lévy measure needs rate > 0 and scale > 0");
  LevyMeasure m;
  m.family_ = MeasureFamily::exponential;
  m.support_ = Support::positive_half_line;
  m.p0_ = rate;
  m.p1_ = scale;
  m.build_table(kDefaultFloor * scale);
  return m;
}

LevyMeasure LevyMeasure::tempered_stable(double stability, Support support, double tempering,
                                         double prefactor) {
  if (!(stability > 0.0 && stability < 2.0))
    throw DomainError("tempered-stable stability index must lie in (0, 2)");
  if (!(tempering > 0.0) || !(prefactor > 0.0))
    throw DomainError("tempered-stable measure needs tempering > 0 and prefactor > 0");
  LevyMeasure m;
  m.family_ = MeasureFamily::tempered_stable;
  m.support_ = support;
  m.p0_ = stability;
  m.p1_ = tempering;
  m.p2_ = prefactor;
  m.build_table(kDefaultFloor / tempering);
  return m;
}

LevyMeasure LevyMeasure::tabulated(std::vector<double> z, std::vector<double> density) {
  if (z.size() < 2 || z.size() != density.size())
    throw DomainError("tabulated Lévy measure needs at least two (z, density) samples");
  if (z.front() < 0.0) throw DomainError("tabulated Lévy measure must live on z >= 0");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i > 0 && !(z[i] > z[i - 1])) throw DomainError("tabulated nodes must be strictly increasing");
    if (!(density[i] >= 0.0)) throw DomainError("tabulated density must be nonnegative");
  }
  std::vector<double> cum(z.size(), 0.0);
  for (std::size_t i = 1; i < z.size(); ++i)
    cum[i] = cum[i - 1] + 0.5 * (z[i] - z[i - 1]) * (density[i] + density[i - 1]);
  if (!(cum.back() > 0.0)) throw DomainError("tabulated Lévy measure has zero mass");

  LevyMeasure m;
  m.family_ = MeasureFamily::tabulated;
  m.support_ = Support::positive_half_line;
  m.p0_ = 0.0;
  m.tab_z_ = std::make_shared<const std::vector<double>>(std::move(z));
  m.tab_f_ = std::make_shared<const std::vector<double>>(std::move(density));
  m.tab_cum_ = std::make_shared<const std::vector<double>>(std::move(cum));

  // Inspection table on the interior nodes with positive tail.
  const auto& zz = *m.tab_z_;
  std::vector<double> tz, tu, ts;
  for (std::size_t i = 0; i < zz.size(); ++i) {
    if (zz[i] <= 0.0) continue;
    const double u = m.tabulated_tail(zz[i]);
    if (!(u > 0.0)) break;
    tz.push_back(zz[i]);
    tu.push_back(u);
    ts.push_back(-zz[i] * m.density(zz[i]) / u);
  }
  if (tz.size() < 2) {
    const double hi = zz.back();
    tz = {1e-6 * hi, 0.5 * hi};
    tu = {m.tabulated_tail(tz[0]), m.tabulated_tail(tz[1])};
    ts = {0.0, 0.0};
  }
  m.table_ = std::make_shared<const TailTable>(std::move(tz), std::move(tu), std::move(ts));
  return m;
}

void LevyMeasure::build_table(double floor) {
  auto f = [this](double z) { return density(z); };
  const double length = decay_length();

  double rough = 0.0;
  if (finite_activity()) {
    rough = p0_;
  } else {
    rough = quad::integrate_decades(f, floor, length, 1e-8).value +
            quad::integrate(f, length, kInf, 1e-8).value;
  }

  double zmax = length;
  double tail = quad::integrate(f, zmax, kInf, 1e-13).value;
  while (tail > kTailCut * rough) {
    zmax *= 1.25;
    tail = quad::integrate(f, zmax, kInf, 1e-13).value;
  }
  // One extra stretch so that U(z_max) sits strictly below the cut.
  zmax *= 1.25;
  tail = quad::integrate(f, zmax, kInf, 1e-13).value;

  std::vector<double> z(kTableNodes), u(kTableNodes), slope(kTableNodes);
  const double l0 = std::log(floor);
  const double l1 = std::log(zmax);
  for (std::size_t k = 0; k < kTableNodes; ++k)
    z[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k) / static_cast<double>(kTableNodes - 1));
  z.front() = floor;
  z.back() = zmax;
  u.back() = tail;
  for (std::size_t k = kTableNodes - 1; k-- > 0;) {
    const double seg =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, z[k], z[k + 1], 0, 0.0);
    u[k] = u[k + 1] + seg;
  }
  for (std::size_t k = 0; k < kTableNodes; ++k) slope[k] = -z[k] * f(z[k]) / u[k];
  if (finite_activity()) below_floor_mass_ = quad::integrate(f, 0.0, floor, 1e-13).value;
  table_ = std::make_shared<const TailTable>(std::move(z), std::move(u), std::move(slope));
}

// ---------------------------------------------------------------------------
// Queries

double LevyMeasure::total_mass() const {
  switch (family_) {
    case MeasureFamily::exponential:
      return p0_;
    case MeasureFamily::tabulated:
      return tab_cum_->back();
    case MeasureFamily::tempered_stable:
      break;
  }
  return kInf;
}

double LevyMeasure::decay_length() const {
  switch (family_) {
    case MeasureFamily::exponential:
      return p1_;
    case MeasureFamily::tempered_stable:
      return 1.0 / p1_;
    case MeasureFamily::tabulated:
      break;
  }
  return tab_z_->back();
}

std::string LevyMeasure::describe() const {
  std::ostringstream os;
  switch (family_) {
    case MeasureFamily::exponential:
      os << "exponential(rate=" << p0_ << ", scale=" << p1_ << ")";
      break;
    case MeasureFamily::tempered_stable:
      os << "tempered_stable(stability=" << p0_ << ", tempering=" << p1_ << ", prefactor=" << p2_
         << (support_ == Support::full_line ? ", symmetric" : ", positive") << ")";
      break;
    case MeasureFamily::tabulated:
      os << "tabulated(" << tab_z_->size() << " samples, mass=" << total_mass() << ")";
      break;
  }
  return os.str();
}

double LevyMeasure::density(double z) const {
  if (support_ == Support::full_line) z = std::abs(z);
  if (!(z > 0.0)) {
    if (family_ == MeasureFamily::exponential && z == 0.0) return p0_ / p1_;
    if (family_ == MeasureFamily::tabulated && z == 0.0 && tab_z_->front() == 0.0)
      return tab_f_->front();
    return z == 0.0 && family_ == MeasureFamily::tempered_stable ? kInf : 0.0;
  }
  switch (family_) {
    case MeasureFamily::exponential:
      return p0_ / p1_ * std::exp(-z / p1_);
    case MeasureFamily::tempered_stable:
      return p2_ * std::pow(z, -p0_ - 1.0) * std::exp(-p1_ * z);
    case MeasureFamily::tabulated: {
      const auto& zz = *tab_z_;
      const auto& ff = *tab_f_;
      if (z < zz.front() || z > zz.back()) return 0.0;
      auto it = std::upper_bound(zz.begin(), zz.end(), z);
      std::size_t i = static_cast<std::size_t>(it - zz.begin());
      if (i >= zz.size()) return ff.back();
      --i;
      const double w = (z - zz[i]) / (zz[i + 1] - zz[i]);
      return ff[i] + w * (ff[i + 1] - ff[i]);
    }
  }
  return 0.0;
}

std::complex<double> LevyMeasure::density(std::complex<double> z) const {
  switch (family_) {
    case MeasureFamily::exponential:
      return p0_ / p1_ * std::exp(-z / p1_);
    case MeasureFamily::tempered_stable:
      return p2_ * std::pow(z, -p0_ - 1.0) * std::exp(-p1_ * z);
    case MeasureFamily::tabulated:
      break;
  }
  throw UnsupportedError("tabulated Lévy measure has no analytic continuation");
}

double LevyMeasure::tabulated_tail(double z) const {
  const auto& zz = *tab_z_;
  const auto& ff = *tab_f_;
  const auto& cum = *tab_cum_;
  const double total = cum.back();
  if (z <= zz.front()) return total;
  if (z >= zz.back()) return 0.0;
  auto it = std::upper_bound(zz.begin(), zz.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - zz.begin()) - 1;
  const double d = z - zz[i];
  const double fz = density(z);
  return std::max(0.0, total - (cum[i] + 0.5 * d * (ff[i] + fz)));
}

double LevyMeasure::tabulated_inverse(double u) const {
  const auto& zz = *tab_z_;
  const auto& ff = *tab_f_;
  const auto& cum = *tab_cum_;
  const double m = cum.back() - u;  // mass on [z0, z]
  if (m <= 0.0) return zz.front();
  if (m >= cum.back()) return zz.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), m);
  const std::size_t i = std::min(static_cast<std::size_t>(it - cum.begin()) - 1, zz.size() - 2);
  const double h = zz[i + 1] - zz[i];
  const double rem = m - cum[i];
  const double a = 0.5 * (ff[i + 1] - ff[i]) / h;
  const double b = ff[i];
  double d;
  if (std::abs(a) * h < 1e-14 * std::max(b, 1e-300)) {
    d = b > 0.0 ? rem / b : 0.0;
  } else {
    const double disc = std::max(0.0, b * b + 4.0 * a * rem);
    d = 2.0 * rem / (b + std::sqrt(disc));
  }
  return zz[i] + std::clamp(d, 0.0, h);
}

double LevyMeasure::positive_tail(double z) const {
  if (std::isnan(z)) throw DomainError("tail integral of NaN");
  if (z < 0.0) throw DomainError("positive tail integral needs z >= 0");
  if (z == kInf) return 0.0;
  if (family_ == MeasureFamily::tabulated) return z == 0.0 ? total_mass() : tabulated_tail(z);
  if (z == 0.0) return total_mass();
  const TailTable& t = *table_;
  auto f = [this](double x) { return density(x); };
  if (z < t.z_min()) return t.u_at_min() + quad::integrate_decades(f, z, t.z_min(), 1e-12).value;
  if (z > t.z_max()) return quad::integrate(f, z, kInf, 1e-13).value;
  return t.value(z);
}

double LevyMeasure::tail_integral(double z) const {
  if (std::isnan(z)) throw DomainError("tail integral of NaN");
  if (z == kInf || z == -kInf) return 0.0;
  if (support_ == Support::positive_half_line) {
    if (z < 0.0) throw DomainError("negative jump size for a measure supported on z > 0");
    return positive_tail(z);
  }
  if (z == 0.0) return finite_activity() ? 2.0 * total_mass() : kInf;
  return z > 0.0 ? positive_tail(z) : -positive_tail(-z);
}

double LevyMeasure::inverse_tail(double u) const {
  if (family_ == MeasureFamily::tabulated) {
    if (!(u > 0.0) || u > total_mass())
      throw RangeError("inverse tail: u must lie in " + fmt_interval(0.0, total_mass()));
    return tabulated_inverse(u);
  }
  const TailTable& t = *table_;
  if (u > t.u_at_min()) {
    if (finite_activity() && u <= total_mass() * (1.0 + 1e-12)) return t.z_min();
    throw RangeError("inverse tail: u must lie in " + fmt_interval(t.u_at_max(), t.u_at_min()));
  }
  if (!(u >= t.u_at_max()))
    throw RangeError("inverse tail: u must lie in " + fmt_interval(t.u_at_max(), t.u_at_min()));
  return t.inverse(u);
}

double LevyMeasure::truncated_mass(double eps) const {
  if (!(eps >= 0.0)) throw DomainError("truncation level must be positive");
  if (eps == 0.0) {
    if (!finite_activity())
      throw DomainError("truncation level must be positive for a sigma-finite measure");
    return support_ == Support::full_line ? 2.0 * total_mass() : total_mass();
  }
  const double one_side = positive_tail(eps);
  return support_ == Support::full_line ? 2.0 * one_side : one_side;
}

double LevyMeasure::sample_positive_magnitude(double eps, double u01) const {
  const double side_mass = eps > 0.0 ? positive_tail(eps) : total_mass();
  if (eps == 0.0 && !finite_activity())
    throw DomainError("truncation level must be positive for a sigma-finite measure");
  const double target = u01 * side_mass;
  if (family_ == MeasureFamily::tabulated) return std::max(tabulated_inverse(target), eps);
  const TailTable& t = *table_;
  double z;
  if (target > t.u_at_min()) {
    // Finite activity, jump below the table floor: linear in the first cell.
    z = std::max(t.z_min() - (target - t.u_at_min()) / density(t.z_min()), 0.0);
    if (!(z > 0.0)) z = std::numeric_limits<double>::min();
  } else if (target < t.u_at_max()) {
    z = t.z_max();
  } else {
    z = t.inverse(target);
  }
  return eps > 0.0 ? std::max(z, std::nextafter(eps, kInf)) : z;
}

double LevyMeasure::table_lo() const {
  if (family_ == MeasureFamily::tabulated) {
    const double z0 = tab_z_->front();
    return z0 > 0.0 ? z0 : kDefaultFloor * tab_z_->back();
  }
  return table_->z_min();
}

double LevyMeasure::table_hi() const {
  return family_ == MeasureFamily::tabulated ? tab_z_->back() : table_->z_max();
}

SmallJumpReport LevyMeasure::check_small_jump_integrability() const {
  auto zf = [this](double z) { return z * density(z); };
  const double sides = support_ == Support::full_line ? 2.0 : 1.0;
  SmallJumpReport rep;
  if (finite_activity()) {
    rep.finite = true;
    rep.value = sides * quad::integrate(zf, 0.0, 1.0, 1e-12).value;
    rep.decay_exponent = kInf;
    return rep;
  }
  // Partial sums over shrinking inner cutoffs 10^-2, 10^-4, ..., 10^-12.
  double partial = quad::integrate_decades(zf, 1e-2, 1.0, 1e-12).value;
  double prev_inc = 0.0;
  double inc = 0.0;
  double hi = 1e-2;
  for (int j = 2; j <= 6; ++j) {
    const double lo = std::pow(10.0, -2.0 * j);
    prev_inc = inc;
    inc = quad::integrate_decades(zf, lo, hi, 1e-12).value;
    partial += inc;
    hi = lo;
  }
  rep.decay_exponent = (prev_inc > 0.0 && inc > 0.0) ? -std::log10(inc / prev_inc) / 2.0 : 0.0;
  rep.finite = rep.decay_exponent > 0.05;
  if (rep.finite) {
    const double r = inc / prev_inc;
    partial += inc * r / (1.0 - r);
  }
  rep.value = sides * partial;
  return rep;
}

}  // namespace levyfilter
