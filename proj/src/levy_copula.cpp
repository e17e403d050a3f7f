#include "levyfilter/levy_copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace levyfilter {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double t) {
  if (t == kInf) return kInf;
  if (t == -kInf) return 0.0;
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

LevyCopula LevyCopula::clayton(double theta, bool half_weights, double sign_weight) {
  if (!(theta > 0.0)) throw DomainError("theta must be > 0");
  if (!(sign_weight >= 0.0 && sign_weight <= 1.0))
    throw DomainError("Clayton sign weight must lie in [0, 1]");
  LevyCopula c;
  c.family_ = CopulaFamily::clayton;
  c.theta_ = theta;
  c.weight_ = half_weights ? 0.5 : 1.0;
  c.sign_ = sign_weight;
  return c;
}

LevyCopula LevyCopula::independence() {
  LevyCopula c;
  c.family_ = CopulaFamily::independence;
  return c;
}

LevyCopula LevyCopula::complete_dependence() {
  LevyCopula c;
  c.family_ = CopulaFamily::complete_dependence;
  return c;
}

std::string LevyCopula::describe() const {
  std::ostringstream os;
  switch (family_) {
    case CopulaFamily::clayton:
      os << "clayton(theta=" << theta_ << (half_weights() ? ", half weights" : ", standard")
         << ", sign_weight=" << sign_ << ")";
      break;
    case CopulaFamily::independence:
      os << "independence";
      break;
    case CopulaFamily::complete_dependence:
      os << "complete_dependence";
      break;
  }
  return os.str();
}

void LevyCopula::check_args(double u1, double u2) const {
  if (!(u1 >= 0.0) || !(u2 >= 0.0))
    throw DomainError("Lévy copula arguments must be nonnegative (signed copulas unsupported)");
}

double LevyCopula::eval(double u1, double u2) const {
  check_args(u1, u2);
  switch (family_) {
    case CopulaFamily::independence:
      return (u2 == kInf ? u1 : 0.0) + (u1 == kInf ? u2 : 0.0);
    case CopulaFamily::complete_dependence:
      return std::min(u1, u2);
    case CopulaFamily::clayton:
      break;
  }
  if (u1 == 0.0 || u2 == 0.0) return 0.0;
  const double margin = sign_ * std::pow(weight_, -1.0 / theta_);
  if (u1 == kInf && u2 == kInf) return kInf;
  if (u1 == kInf) return margin * u2;
  if (u2 == kInf) return margin * u1;
  const double lu1 = std::log(u1);
  const double t = theta_ * (std::log(u2) - lu1);
  return sign_ * std::exp(lu1 - (std::log(weight_) + softplus(-t)) / theta_);
}

double LevyCopula::d_du2(double u1, double u2) const {
  check_args(u1, u2);
  switch (family_) {
    case CopulaFamily::independence:
      return u1 == kInf ? 1.0 : 0.0;
    case CopulaFamily::complete_dependence:
      return u2 < u1 ? 1.0 : 0.0;
    case CopulaFamily::clayton:
      break;
  }
  if (u1 == 0.0 || u2 == kInf) return 0.0;
  if (u2 == 0.0 || u1 == kInf) return sign_ * std::pow(weight_, -1.0 / theta_);
  const double t = theta_ * (std::log(u2) - std::log(u1));
  return sign_ * weight_ * std::exp(-(1.0 / theta_ + 1.0) * (std::log(weight_) + softplus(t)));
}

double LevyCopula::inverse_d_du2(double y, double u2) const {
  if (family_ != CopulaFamily::clayton) throw UnsupportedError("inverse_d_du2 needs the Clayton copula");
  const double top = sign_ * std::pow(weight_, -1.0 / theta_);
  if (!(y > 0.0) || !(y < top) || !(u2 > 0.0)) throw DomainError("inverse_d_du2: y outside (0, dH/du2(inf, u2))");
  // y = s w exp(-(1/theta + 1)(log w + softplus(t))), t = theta (log u2 - log u1)
  const double sp = -std::log(y / (sign_ * weight_)) / (1.0 / theta_ + 1.0) - std::log(weight_);
  const double t = sp + std::log(-std::expm1(-sp));
  return std::exp(std::log(u2) - t / theta_);
}

double LevyCopula::mixed_density(double u1, double u2) const {
  if (family_ != CopulaFamily::clayton)
    throw UnsupportedError("mixed density is singular for the " + describe() + " copula");
  if (!(u1 > 0.0) || !(u2 > 0.0)) throw DomainError("mixed density needs u1, u2 > 0");
  if (u1 == kInf || u2 == kInf) return 0.0;
  const double lu1 = std::log(u1);
  const double lu2 = std::log(u2);
  const double t = theta_ * (lu2 - lu1);
  const double log_s = std::log(weight_) - theta_ * lu1 + softplus(-t);
  return sign_ * (1.0 + theta_) * weight_ * weight_ *
         std::exp(-(theta_ + 1.0) * (lu1 + lu2) - (1.0 / theta_ + 2.0) * log_s);
}

double joint_tail(const LevyCopula& c, const LevyMeasure& m1, const LevyMeasure& m2, double z1,
                  double z2) {
  if (!(z1 > 0.0) || !(z2 > 0.0)) throw DomainError("joint tail needs z1, z2 > 0");
  return c.eval(m1.positive_tail(z1), m2.positive_tail(z2));
}

double SurvivalCopula::operator()(double u, double v) const {
  if (lambda_h == 0.0) return 0.0;
  return copula.eval(lambda1 * u, lambda2 * v) / lambda_h;
}

SurvivalCopula survival_copula_finite(const LevyCopula& c, double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw DomainError("survival copula needs finite activities lambda1, lambda2 > 0");
  return SurvivalCopula{c, lambda1, lambda2, c.eval(lambda1, lambda2)};
}

double scaling_check(const LevyCopula& c, std::span<const double> gammas, int pairs,
                     std::uint64_t seed) {
  return scaling_check([&c](double u, double v) { return c.eval(u, v); }, gammas, pairs, seed);
}

// ---------------------------------------------------------------------------

ConditionalJumpLaw::ConditionalJumpLaw(const LevyCopula& c, const LevyMeasure& m1, double u2,
                                       double z2)
    : copula_(c), m1_(m1), z2_(z2), u2_(u2) {
  const double u_top = m1.finite_activity() ? m1.total_mass() : kInf;
  const double lo = m1.table_lo();
  const double hi = m1.table_hi();

  if (c.family() == CopulaFamily::complete_dependence) {
    point_ = true;
    mass_ = u2 <= u_top ? 1.0 : 0.0;
    if (u2 >= m1.positive_tail(lo)) {
      atom_ = lo;
    } else if (u2 <= m1.positive_tail(hi)) {
      atom_ = hi;
    } else {
      atom_ = m1.inverse_tail(u2);
    }
    z_ = {0.0, atom_};
    cum_ = {0.0, mass_};
    return;
  }

  mass_ = c.d_du2(u_top, u2);
  z_.resize(kNodes + 1);
  cum_.resize(kNodes + 1);
  z_[0] = 0.0;
  cum_[0] = 0.0;
  const double l0 = std::log(lo);
  const double l1 = std::log(hi);
  for (std::size_t k = 1; k <= kNodes; ++k) {
    z_[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k - 1) / static_cast<double>(kNodes - 1));
    const double c_k = mass_ - c.d_du2(m1.positive_tail(z_[k]), u2);
    cum_[k] = std::clamp(c_k, cum_[k - 1], mass_);
  }
  z_[1] = lo;
  z_.back() = hi;
  // Mass beyond the last node is folded into the final segment.
  cum_.back() = mass_;
}

double ConditionalJumpLaw::density(double z1) const {
  if (point_) throw UnsupportedError("conditional law of complete dependence is an atom");
  if (!(z1 > 0.0)) return 0.0;
  const double u1 = m1_.positive_tail(z1);
  if (!(u1 > 0.0)) return 0.0;
  return copula_.mixed_density(u1, u2_) * m1_.density(z1);
}

double ConditionalJumpLaw::cdf(double z1) const {
  if (!(mass_ > 0.0)) return 0.0;
  if (point_) return z1 >= atom_ ? 1.0 : 0.0;
  if (z1 <= 0.0) return 0.0;
  if (z1 >= z_.back()) return 1.0;
  auto it = std::upper_bound(z_.begin(), z_.end(), z1);
  const std::size_t k = static_cast<std::size_t>(it - z_.begin()) - 1;
  const double w = (z1 - z_[k]) / (z_[k + 1] - z_[k]);
  return (cum_[k] + w * (cum_[k + 1] - cum_[k])) / mass_;
}

double ConditionalJumpLaw::quantile(double u) const {
  if (!(mass_ > 1e-12))
    throw DegeneracyError("conditional jump law has negligible mass: mark is effectively independent");
  if (point_) return atom_;
  const double target = u * mass_;
  auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  std::size_t k = static_cast<std::size_t>(it - cum_.begin());
  k = std::clamp<std::size_t>(k, 1, cum_.size() - 1) - 1;
  const double dc = cum_[k + 1] - cum_[k];
  const double w = dc > 0.0 ? std::clamp((target - cum_[k]) / dc, 0.0, 1.0) : 0.5;
  return z_[k] + w * (z_[k + 1] - z_[k]);
}

double ConditionalJumpLaw::exact_quantile(double u) const {
  if (!(mass_ > 1e-12))
    throw DegeneracyError("conditional jump law has negligible mass: mark is effectively independent");
  if (point_) return atom_;
  return conditional_quantile(copula_, m1_, u2_, u);
}

double ConditionalJumpLaw::mean() const {
  if (!(mass_ > 0.0)) return 0.0;
  if (point_) return atom_;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < z_.size(); ++k)
    s += (cum_[k + 1] - cum_[k]) * 0.5 * (z_[k] + z_[k + 1]);
  return s / mass_;
}

std::complex<double> ConditionalJumpLaw::characteristic(double xi) const {
  if (!(mass_ > 0.0)) return 0.0;
  if (point_) return std::polar(1.0, xi * atom_);
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k + 1 < z_.size(); ++k) {
    const double p = cum_[k + 1] - cum_[k];
    if (p == 0.0) continue;
    const double h = z_[k + 1] - z_[k];
    s += p * sinc(0.5 * xi * h) * std::polar(1.0, xi * 0.5 * (z_[k] + z_[k + 1]));
  }
  return s / mass_;
}

double conditional_quantile(const LevyCopula& c, const LevyMeasure& m1, double u2, double u) {
  if (c.family() == CopulaFamily::clayton && c.sign_weight() != 1.0)
    throw UnsupportedError("conditional jump laws require sign_weight = 1 (positive jumps)");
  if (c.family() == CopulaFamily::complete_dependence) {
    if (m1.finite_activity() && u2 > m1.total_mass())
      throw DegeneracyError("conditional jump law has negligible mass: mark is effectively independent");
    if (u2 >= m1.positive_tail(m1.table_lo())) return m1.table_lo();
    if (u2 <= m1.positive_tail(m1.table_hi())) return m1.table_hi();
    return m1.inverse_tail(u2);
  }
  if (c.family() != CopulaFamily::clayton)
    throw UnsupportedError("no conditional jump law for the " + c.describe() + " copula");
  const double lo = m1.table_lo();
  const double hi = m1.table_hi();
  const double mass = c.d_du2(m1.finite_activity() ? m1.total_mass() : kInf, u2);
  if (!(mass > 1e-12))
    throw DegeneracyError("conditional jump law has negligible mass: mark is effectively independent");
  // raw cumulative mass up to z is mass - dH/du2(U1(z), u2); below the table
  // edge the mass is spread uniformly as in the tabulated law
  const double y = mass * (1.0 - u);
  if (!(y > 0.0)) return hi;
  const double cum_lo = mass - c.d_du2(m1.positive_tail(lo), u2);
  if (mass - y <= cum_lo) return cum_lo > 0.0 ? lo * (mass - y) / cum_lo : lo;
  const double u1 = c.inverse_d_du2(y, u2);
  if (u1 <= m1.positive_tail(hi)) return hi;
  return std::clamp(m1.inverse_tail(u1), lo, hi);
}

ConditionalJumpLaw conditional_law(const LevyCopula& c, const LevyMeasure& m1,
                                   const LevyMeasure& m2, double z2) {
  if (c.family() == CopulaFamily::independence)
    throw UnsupportedError("independence copula has no conditional jump law (no common jumps)");
  if (c.family() == CopulaFamily::clayton && c.sign_weight() != 1.0)
    throw UnsupportedError("conditional jump laws require sign_weight = 1 (positive jumps)");
  if (!(z2 > 0.0) || z2 > m2.table_hi()) {
    std::ostringstream os;
    os << "observed jump " << z2 << " outside (0, " << m2.table_hi() << "]";
    throw RangeError(os.str());
  }
  return ConditionalJumpLaw(c, m1, m2.positive_tail(z2), z2);
}

}  // namespace levyfilter
