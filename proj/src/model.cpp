#include "levyfilter/model.hpp"

#include <algorithm>
#include <cmath>

#include "levyfilter/errors.hpp"

namespace levyfilter {

InitialLaw InitialLaw::gaussian(double mean, double sd) {
  if (!(sd > 0.0) || !std::isfinite(mean)) throw DomainError("Gaussian initial law needs sd > 0");
  InitialLaw l;
  l.kind_ = Kind::gaussian;
  l.a_ = mean;
  l.b_ = sd;
  return l;
}

InitialLaw InitialLaw::uniform(double lo, double hi) {
  if (!(hi > lo)) throw DomainError("uniform initial law needs lo < hi");
  InitialLaw l;
  l.kind_ = Kind::uniform;
  l.a_ = lo;
  l.b_ = hi;
  return l;
}

InitialLaw InitialLaw::point(double x) {
  InitialLaw l;
  l.kind_ = Kind::point;
  l.a_ = x;
  return l;
}

InitialLaw InitialLaw::tabulated(std::vector<double> x, std::vector<double> p) {
  if (x.size() < 2 || x.size() != p.size())
    throw DomainError("tabulated initial law needs at least two (x, p) samples");
  std::vector<double> cum(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("tabulated nodes must be strictly increasing");
    if (!(p[i] >= 0.0)) throw DomainError("tabulated density must be nonnegative");
    if (i > 0) cum[i] = cum[i - 1] + 0.5 * (x[i] - x[i - 1]) * (p[i] + p[i - 1]);
  }
  const double total = cum.back();
  if (!(total > 0.0)) throw DomainError("tabulated initial law has zero mass");
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] /= total;
    cum[i] /= total;
  }
  InitialLaw l;
  l.kind_ = Kind::tabulated;
  l.x_ = std::move(x);
  l.p_ = std::move(p);
  l.cum_ = std::move(cum);
  return l;
}

double InitialLaw::mean() const {
  switch (kind_) {
    case Kind::gaussian:
    case Kind::point:
      return a_;
    case Kind::uniform:
      return 0.5 * (a_ + b_);
    case Kind::tabulated:
      break;
  }
  // Exact first moment of the piecewise-linear density.
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double h = x_[i + 1] - x_[i];
    m += h * (p_[i] * (2.0 * x_[i] + x_[i + 1]) + p_[i + 1] * (x_[i] + 2.0 * x_[i + 1])) / 6.0;
  }
  return m;
}

double InitialLaw::pdf(double x) const {
  switch (kind_) {
    case Kind::gaussian: {
      const double s = (x - a_) / b_;
      return std::exp(-0.5 * s * s) / (b_ * std::sqrt(2.0 * M_PI));
    }
    case Kind::uniform:
      return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case Kind::point:
      throw UnsupportedError("point initial law has no density");
    case Kind::tabulated:
      break;
  }
  if (x < x_.front() || x > x_.back()) return 0.0;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i >= x_.size()) return p_.back();
  --i;
  const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return p_[i] + w * (p_[i + 1] - p_[i]);
}

double InitialLaw::tab_cdf(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  return cum_[i] + 0.5 * (x - x_[i]) * (p_[i] + pdf(x));
}

double InitialLaw::mass_inside(double lo, double hi) const {
  switch (kind_) {
    case Kind::gaussian: {
      const double r = 1.0 / (b_ * std::sqrt(2.0));
      return 0.5 * (std::erfc((lo - a_) * r) - std::erfc((hi - a_) * r));
    }
    case Kind::uniform:
      return std::max(0.0, std::min(hi, b_) - std::max(lo, a_)) / (b_ - a_);
    case Kind::point:
      return (a_ >= lo && a_ <= hi) ? 1.0 : 0.0;
    case Kind::tabulated:
      break;
  }
  return tab_cdf(hi) - tab_cdf(lo);
}

double InitialLaw::sample(double u, double v) const {
  switch (kind_) {
    case Kind::gaussian:
      // Box-Muller, one variate.
      return a_ + b_ * std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
    case Kind::uniform:
      return a_ + (b_ - a_) * u;
    case Kind::point:
      return a_;
    case Kind::tabulated:
      break;
  }
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), 1, cum_.size() - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double rem = u - cum_[i];
  const double a = 0.5 * (p_[i + 1] - p_[i]) / h;
  const double b = p_[i];
  double d;
  if (std::abs(a) * h < 1e-14 * std::max(b, 1e-300)) {
    d = b > 0.0 ? rem / b : 0.5 * h;
  } else {
    d = 2.0 * rem / (b + std::sqrt(std::max(0.0, b * b + 4.0 * a * rem)));
  }
  return x_[i] + std::clamp(d, 0.0, h);
}

// ---------------------------------------------------------------------------

double ModelSpec::signal_only_rate() const {
  return common_jumps() ? 0.0 : nu1.truncated_mass(epsilon);
}

double ModelSpec::observed_jump_rate() const {
  return nu2.truncated_mass(epsilon);
}

void ModelSpec::validate() const {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  const bool sigma_finite = !nu1.finite_activity() || !nu2.finite_activity() || l0.has_value();
  if (sigma_finite && !(epsilon > 0.0))
    throw DomainError("epsilon must be > 0 when a jump measure is sigma-finite");
  if (nu1.support() != Support::positive_half_line || nu2.support() != Support::positive_half_line)
    throw DomainError("signal and observation jump measures must live on z > 0");
  if (copula.family() == CopulaFamily::clayton && copula.sign_weight() != 1.0)
    throw UnsupportedError("Clayton sign weight other than 1 is not supported by the filters");
  if (l0) {
    if (l0->support() != Support::full_line)
      throw DomainError("L0 must be a symmetric (full-line) measure");
    if (!(l0->stability() > 1.0 && l0->stability() < 2.0))
      throw DomainError("L0 stability index must lie in (1, 2)");
  }
}

double ModelSpec::sensor_bound(double half_width) const {
  if (!sensor.bounded()) throw DomainError("sensor g is unbounded");
  double sup = 0.0;
  const int n = 4096;
  for (int j = 0; j <= n; ++j) {
    const double x = -half_width + 2.0 * half_width * j / n;
    const double v = sensor(x);
    if (!std::isfinite(v)) throw DomainError("sensor g is not finite on the solver domain");
    sup = std::max(sup, std::abs(v));
  }
  return sup;
}

LevyMeasure make_l0(double alpha, double tempering, double prefactor) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("L0 stability index must lie in (1, 2)");
  return LevyMeasure::tempered_stable(alpha, Support::full_line, tempering, prefactor);
}

}  // namespace levyfilter
