#include "levyfilter/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyfilter/errors.hpp"
#include "levyfilter/quadrature.hpp"

namespace levyfilter {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSymTol = 1e-12;

Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double tol = kSymTol) {
  const double re = quad::integrate([&](double s) { return f(s).real(); }, a, b, tol).value;
  const double im = quad::integrate([&](double s) { return f(s).imag(); }, a, b, tol).value;
  return {re, im};
}

/// int_a^b (p + q (z - a)) e^{i xi z} dz, exact.
Complex linear_segment_transform(double a, double b, double p, double q, double xi) {
  const double h = b - a;
  if (std::abs(xi) * h < 1e-2) {
    // Short segment: Simpson on the (nearly polynomial) integrand is exact
    // to far below the tabulation error.
    auto g = [&](double z) { return (p + q * (z - a)) * std::polar(1.0, xi * z); };
    return h / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
  }
  const Complex i_xi(0.0, xi);
  const Complex ea = std::polar(1.0, xi * a);
  const Complex eb = std::polar(1.0, xi * b);
  const Complex i0 = (eb - ea) / i_xi;
  const Complex i1 = h * eb / i_xi - (eb - ea) / (i_xi * i_xi);
  return p * i0 + q * i1;
}

/// F(c) = int_c^inf e^{i xi z} f(z) dz over the positive half line, xi >= 0.
Complex positive_transform(const LevyMeasure& m, double c, double xi) {
  if (xi == 0.0) return m.positive_tail(c);
  if (m.family() == MeasureFamily::tabulated) {
    const auto nodes_hi = m.table_hi();
    if (c >= nodes_hi) return 0.0;
    // Rebuild the piecewise-linear density from its samples.
    Complex s = 0.0;
    const int pieces = 4096;
    const double lo = std::max(c, 0.0);
    const double h = (nodes_hi - lo) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double a = lo + k * h;
      const double b = a + h;
      const double fa = m.density(a);
      const double fb = m.density(b);
      s += linear_segment_transform(a, b, fa, (fb - fa) / h, xi);
    }
    return s;
  }
  const double length = m.decay_length();
  if (xi * length <= 4.0) {
    auto g = [&](double z) { return m.density(z) * std::polar(1.0, xi * z); };
    Complex s = 0.0;
    if (c > 0.0 && c < length) {
      double lo = c;
      while (lo < length) {
        const double hi = std::min(lo * 10.0, length);
        s += integrate_complex(g, lo, hi);
        lo = hi;
      }
      s += integrate_complex(g, length, kInf);
    } else {
      s += integrate_complex(g, c, kInf);
    }
    return s;
  }
  // Rotate the contour to z = c + i s, where e^{i xi z} decays like e^{-xi s}.
  auto g = [&](double s) { return std::exp(-xi * s) * m.density(Complex(c, s)); };
  const double s_end = 50.0 / xi;
  double lo = 0.0;
  double hi = c > 0.0 ? std::min(c, 1.0 / xi) : 1.0 / xi;
  Complex sum = 0.0;
  while (lo < s_end) {
    sum += integrate_complex(g, lo, hi);
    lo = hi;
    hi = std::min(hi * 4.0, s_end);
  }
  return Complex(0.0, 1.0) * std::polar(1.0, xi * c) * sum;
}

}  // namespace

Complex truncated_symbol(const LevyMeasure& m, double eps, double xi) {
  if (!(eps >= 0.0)) throw DomainError("truncation level must be >= 0");
  if (eps == 0.0 && !m.finite_activity())
    throw DomainError("truncation level must be positive for a sigma-finite measure");
  if (xi == 0.0) return 0.0;
  const double x = std::abs(xi);
  Complex p = positive_transform(m, eps, x) - m.positive_tail(eps);
  if (m.support() == Support::full_line) return 2.0 * p.real();
  return xi < 0.0 ? std::conj(p) : p;
}

Complex symbol_L0(const LevyMeasure& l0, double xi) {
  if (l0.support() != Support::full_line)
    throw DomainError("L0 symbol needs a symmetric full-line measure");
  if (xi == 0.0) return 0.0;
  const double x = std::abs(xi);
  const double c = std::min(1.0, M_PI / x);
  auto near = [&](double z) {
    const double s = std::sin(0.5 * x * z);
    return -2.0 * s * s * l0.density(z);
  };
  double inner;
  try {
    inner = quad::integrate_graded(near, c, kSymTol).value;
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "L0 symbol quadrature failed at xi = " << xi << ": " << e.what();
    throw NumericalError(os.str());
  }
  const double outer = positive_transform(l0, c, x).real() - l0.positive_tail(c);
  return 2.0 * (inner + outer);
}

Complex symbol_Bz(const ConditionalJumpLaw& law, double xi) {
  return law.raw_mass() * (law.characteristic(xi) - 1.0);
}

SymbolFn make_L0_symbol(const LevyMeasure& l0) {
  return {[l0](double xi) { return symbol_L0(l0, xi); }, "quadrature(" + l0.describe() + ")"};
}

SymbolFn make_Bz_symbol(const LevyCopula& c, const LevyMeasure& nu1, const LevyMeasure& nu2,
                        double z2) {
  auto law = std::make_shared<const ConditionalJumpLaw>(conditional_law(c, nu1, nu2, z2));
  std::ostringstream os;
  os << "conditional-law table(" << c.describe() << ", z2=" << z2 << ")";
  return {[law](double xi) { return symbol_Bz(*law, xi); }, os.str()};
}

// ---------------------------------------------------------------------------

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

Line least_squares(const double* x, const double* y, std::size_t n) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - l.intercept - l.slope * x[i];
      ssr += r * r;
    }
    l.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return l;
}

}  // namespace

BGIndexReport estimate_bg_index(const std::function<Complex(double)>& sym, double xi_lo,
                                double xi_hi, IndexDirection direction, int samples) {
  if (!(xi_lo > 0.0) || !(xi_hi > xi_lo)) throw DomainError("index window must satisfy 0 < lo < hi");
  if (samples < 8) throw DomainError("index estimation needs at least 8 samples");
  std::vector<double> lx(samples), ly(samples);
  for (int i = 0; i < samples; ++i) {
    const double xi = xi_lo * std::pow(xi_hi / xi_lo, static_cast<double>(i) / (samples - 1));
    const double a = std::abs(sym(xi));
    if (!(a > 0.0) || !std::isfinite(a)) {
      std::ostringstream os;
      os << "symbol vanishes or is not finite at xi = " << xi << "; index undefined";
      throw DomainError(os.str());
    }
    lx[i] = std::log(xi);
    ly[i] = std::log(a);
  }
  BGIndexReport rep;
  rep.xi_lo = xi_lo;
  rep.xi_hi = xi_hi;
  rep.direction = direction;
  const Line all = least_squares(lx.data(), ly.data(), lx.size());
  double est = all.slope;
  double err = all.slope_stderr;
  if (direction != IndexDirection::plain) {
    const std::size_t w = std::max<std::size_t>(8, lx.size() / 4);
    for (std::size_t i = 0; i + w <= lx.size(); ++i) {
      const Line sub = least_squares(lx.data() + i, ly.data() + i, w);
      const bool better = direction == IndexDirection::upper ? sub.slope > est : sub.slope < est;
      if (better) {
        est = sub.slope;
        err = sub.slope_stderr;
      }
    }
  }
  rep.estimate = std::clamp(est, 0.0, 2.0);
  rep.slope_stderr = err;
  return rep;
}

std::vector<KSample> estimate_k(const LevyCopula& c, const LevyMeasure& nu1,
                                const LevyMeasure& nu2, const std::vector<double>& z_grid,
                                double beta_plus, double xi_lo, double xi_hi, int samples) {
  std::vector<KSample> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) {
    const ConditionalJumpLaw law = conditional_law(c, nu1, nu2, z);
    double k = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double xi = xi_lo * std::pow(xi_hi / xi_lo, static_cast<double>(i) / (samples - 1));
      k = std::max(k, std::abs(symbol_Bz(law, xi)) / std::pow(xi, beta_plus));
    }
    out.push_back({z, k});
  }
  return out;
}

PowerFit fit_power_law(const std::vector<KSample>& ks) {
  std::vector<double> lx, ly;
  for (const auto& s : ks) {
    if (s.z <= 1.0 && s.k > 0.0) {
      lx.push_back(std::log(s.z));
      ly.push_back(std::log(s.k));
    }
  }
  if (lx.size() < 2) throw DomainError("power-law fit needs two samples with z <= 1 and k > 0");
  const Line l = least_squares(lx.data(), ly.data(), lx.size());
  return {std::exp(l.intercept), l.slope};
}

bool power_moment_finite(const LevyMeasure& m, double power) {
  auto f = [&](double z) { return std::pow(z, power) * m.density(z); };
  double prev = 0.0;
  double inc = 0.0;
  double hi = 1e-2;
  for (int j = 2; j <= 6; ++j) {
    const double lo = std::pow(10.0, -2.0 * j);
    prev = inc;
    inc = quad::integrate_decades(f, lo, hi, 1e-10).value;
    hi = lo;
  }
  if (!(prev > 0.0) || !(inc > 0.0)) return true;  // no mass near zero
  return -std::log10(inc / prev) / 2.0 > 0.02;
}

const ConditionFlag& WellposednessReport::condition(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw DomainError("unknown well-posedness condition '" + name + "'");
}

WellposednessReport check_wellposedness(const WellposednessInputs& in, const LevyMeasure& nu2) {
  WellposednessReport rep;
  rep.alpha0_minus = in.alpha0_minus;
  rep.beta_plus = in.beta_plus;
  rep.k_samples = in.k_samples;
  rep.delta_g = in.delta_g;
  rep.rho = in.rho;
  rep.rho0 = in.rho0;
  rep.p_chosen = std::nan("");

  bool have_fit = false;
  try {
    rep.k_fit = fit_power_law(in.k_samples);
    have_fit = true;
  } catch (const DomainError&) {
  }

  auto ratio_ok = [&](double p) { return in.alpha0_minus > 0.0 && in.beta_plus / in.alpha0_minus < 1.0 / p; };
  auto time_ok = [&](double p) { return in.rho - in.rho0 < 1.0 / p; };
  auto k_ok = [&](double p) { return have_fit && power_moment_finite(nu2, rep.k_fit.exponent * p); };

  bool any_ratio = false, any_time = false, any_k = false;
  for (int i = 1; i <= 100; ++i) {
    const double p = 1.0 + 0.01 * i;
    const bool r = ratio_ok(p), t = time_ok(p), k = k_ok(p);
    any_ratio = any_ratio || r;
    any_time = any_time || t;
    any_k = any_k || k;
    if (r && t && k) {
      rep.p_chosen = p;
      break;
    }
  }
  const bool found = !std::isnan(rep.p_chosen);
  auto detail = [](const char* what, double a, double b) {
    std::ostringstream os;
    os << what << ": " << a << " vs " << b;
    return os.str();
  };

  rep.conditions.push_back({"alpha0_gt_1", in.alpha0_minus > 1.0,
                            detail("lower index of psi0 against 1", in.alpha0_minus, 1.0)});
  const double p_ref = found ? rep.p_chosen : 1.01;
  rep.conditions.push_back({"index_ratio", found ? true : any_ratio,
                            detail("beta_plus/alpha0_minus against 1/p", in.beta_plus / in.alpha0_minus,
                                   1.0 / p_ref)});
  {
    std::ostringstream os;
    if (have_fit)
      os << "k(z) ~ " << rep.k_fit.prefactor << " z^" << rep.k_fit.exponent
         << ", integral of k^p over z <= 1 against nu2";
    else
      os << "no usable k(z) samples";
    rep.conditions.push_back({"k_integrability", found ? true : any_k, os.str()});
  }
  rep.conditions.push_back({"g_regularity", in.delta_g > 1.0 - in.alpha0_minus / 2.0,
                            detail("delta_g against 1 - alpha0_minus/2", in.delta_g,
                                   1.0 - in.alpha0_minus / 2.0)});
  rep.conditions.push_back({"time_regularity", found ? true : any_time,
                            detail("rho - rho0 against 1/p", in.rho - in.rho0, 1.0 / p_ref)});
  rep.verdict = found;
  for (const auto& c : rep.conditions) rep.verdict = rep.verdict && c.pass;
  return rep;
}

WellposednessReport check_wellposedness(const ModelSpec& model) {
  if (!model.l0) throw UnsupportedError("well-posedness check needs an L0 component");
  WellposednessInputs in;
  in.alpha0_minus =
      estimate_bg_index(make_L0_symbol(*model.l0), 1e2, 1e5, IndexDirection::lower).estimate;
  std::vector<double> zs;
  for (int i = 0; i <= 6; ++i) zs.push_back(std::pow(10.0, -3.0 + 0.5 * i));
  if (std::isnan(model.exponents.beta_plus)) {
    double b = 0.0;
    for (double z : zs) {
      const SymbolFn phi = make_Bz_symbol(model.copula, model.nu1, model.nu2, z);
      b = std::max(b, estimate_bg_index(phi.eval, 1e2, 1e5, IndexDirection::upper).estimate);
    }
    in.beta_plus = b;
  } else {
    in.beta_plus = model.exponents.beta_plus;
  }
  in.k_samples = estimate_k(model.copula, model.nu1, model.nu2, zs, in.beta_plus);
  in.delta_g = model.exponents.delta_g;
  in.rho = model.exponents.rho;
  in.rho0 = model.exponents.rho0;
  return check_wellposedness(in, model.nu2);
}

}  // namespace levyfilter
