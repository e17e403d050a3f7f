#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "doctest.h"
#include "levyfilter/symbols.hpp"

using namespace levyfilter;

namespace {

// Symmetric tempered stable, unit tempering and prefactor:
// psi(xi) = 2 Gamma(-a) [(1 + xi^2)^{a/2} cos(a arctan xi) - 1].
double ts_symbol_closed(double a, double xi) {
  return 2.0 * boost::math::tgamma(-a) *
         (std::pow(1.0 + xi * xi, a / 2.0) * std::cos(a * std::atan(xi)) - 1.0);
}

ModelSpec corollary_model() {
  ModelSpec m(LevyMeasure::tempered_stable(0.5), LevyMeasure::tempered_stable(0.5),
              LevyCopula::clayton(1.0, false));
  m.l0 = make_l0(1.5);
  m.sensor = SensorSpec::gaussian_bump();
  m.drift = DriftSpec::linear(-1.0);
  m.exponents.beta_plus = 1.0;
  return m;
}

}  // namespace

TEST_CASE("L0 symbol") {
  const auto l0 = make_l0(1.5);
  CHECK(symbol_L0(l0, 0.0) == Complex(0.0, 0.0));
  for (double xi : {0.1, 1.0, 7.0, 300.0, 2e4})
    CHECK(symbol_L0(l0, xi).real() == doctest::Approx(ts_symbol_closed(1.5, xi)).epsilon(1e-9));
  const auto l1 = make_l0(1.2);
  for (double xi : {0.5, 40.0}) {
    CHECK(symbol_L0(l1, xi).real() == doctest::Approx(ts_symbol_closed(1.2, xi)).epsilon(1e-9));
    CHECK(symbol_L0(l1, -xi).real() == doctest::Approx(symbol_L0(l1, xi).real()).epsilon(1e-14));
  }
  for (double xi = 0.01; xi < 1e5; xi *= 1.9) CHECK(symbol_L0(l0, xi).real() <= 0.0);

  double rmin = INFINITY, rmax = 0.0;
  for (double xi = 1e2; xi <= 1e4; xi *= 1.2) {
    const double r = std::abs(symbol_L0(l0, xi)) / std::pow(xi, 1.5);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  CHECK(rmax / rmin < 1.1);
}

TEST_CASE("truncated symbol against quadrature") {
  const auto l0 = make_l0(1.5);
  const double eps = 0.05;
  for (double xi : {0.7, 5.0, 60.0}) {
    auto f = [xi](double z) { return (std::cos(xi * z) - 1.0) * std::pow(z, -2.5) * std::exp(-z); };
    const double q = 2.0 * (boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, eps, 1.0, 15, 1e-12) +
                            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 1.0, 60.0, 15, 1e-12));
    const Complex v = truncated_symbol(l0, eps, xi);
    CHECK(v.real() == doctest::Approx(q).epsilon(1e-8));
    CHECK(std::abs(v.imag()) < 1e-12);
  }
  // positive compound Poisson: (e^{i xi z} - 1) against Exp(rate 2) above eps
  const auto e = LevyMeasure::exponential(2.0);
  const double xi = 3.0;
  const Complex expect = 2.0 * std::exp(-eps) * (std::exp(Complex(0, xi * eps)) / (1.0 - Complex(0, xi)) - 1.0);
  CHECK(std::abs(truncated_symbol(e, eps, xi) - expect) < 1e-9);
}

TEST_CASE("jump symbol") {
  const auto m = LevyMeasure::exponential(2.0);
  const auto c = LevyCopula::clayton(2.0, true);
  const SymbolFn phi = make_Bz_symbol(c, m, m, 0.3);
  CHECK(std::abs(phi(0.0)) < 1e-14);
  const auto law = conditional_law(c, m, m, 0.3);
  double sup = 0.0;
  for (double xi = 0.1; xi < 1e5; xi *= 1.3) sup = std::max(sup, std::abs(phi(xi)));
  CHECK(sup <= 2.0 * law.raw_mass());

  for (double xi : {0.5, 3.0}) {
    auto re = [&](double z) { return (std::cos(xi * z) - 1.0) * law.density(z); };
    auto im = [&](double z) { return std::sin(xi * z) * law.density(z); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const Complex q(GK::integrate(re, 0.0, 40.0, 15, 1e-12), GK::integrate(im, 0.0, 40.0, 15, 1e-12));
    CHECK(std::abs(phi(xi) - q) < 1e-4 * std::abs(q));  // piecewise-uniform table
  }
  CHECK_THROWS_AS(make_Bz_symbol(LevyCopula::independence(), m, m, 0.3), UnsupportedError);
}

TEST_CASE("Blumenthal-Getoor index") {
  const auto l0 = make_l0(1.5);
  const auto plain = estimate_bg_index(make_L0_symbol(l0).eval);
  CHECK(plain.estimate == doctest::Approx(1.5).epsilon(0.05 / 1.5));
  CHECK(estimate_bg_index(make_L0_symbol(make_l0(1.2)).eval).estimate == doctest::Approx(1.2).epsilon(0.05 / 1.2));

  const auto m = LevyMeasure::exponential(2.0);
  const SymbolFn phi = make_Bz_symbol(LevyCopula::clayton(2.0, true), m, m, 0.3);
  CHECK(estimate_bg_index(phi.eval).estimate <= 0.05);

  const auto drift = [](double xi) { return Complex(0.0, 0.7 * xi); };
  CHECK(estimate_bg_index(drift).estimate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(estimate_bg_index(drift, 1e2, 1e5, IndexDirection::upper).estimate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(estimate_bg_index([](double) { return Complex(0.0, 0.0); }), DomainError);
}

TEST_CASE("k(z) on the tempered setup") {
  const auto m = LevyMeasure::tempered_stable(0.5);
  const auto c = LevyCopula::clayton(1.0, false);
  std::vector<double> zs{1e-3, 1e-2, 1e-1, 1.0};
  const auto ks = estimate_k(c, m, m, zs, 1.0);
  REQUIRE(ks.size() == zs.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    CHECK(ks[i].k >= 0.0);
    if (i) CHECK(ks[i].k >= ks[i - 1].k);
  }
  CHECK_THROWS_AS(estimate_k(LevyCopula::independence(), m, m, zs, 1.0), UnsupportedError);

  const auto fit = fit_power_law({{0.01, 3e-2}, {0.1, 3e-1}, {1.0, 3.0}});
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("power moments") {
  const auto m = LevyMeasure::tempered_stable(0.5);
  CHECK(power_moment_finite(m, 1.0));
  CHECK(power_moment_finite(m, 0.6));
  CHECK_FALSE(power_moment_finite(m, 0.4));
  CHECK(power_moment_finite(LevyMeasure::exponential(1.0), 0.0));
}

TEST_CASE("well-posedness") {
  const ModelSpec m = corollary_model();
  const auto rep = check_wellposedness(m);
  CHECK(rep.verdict);
  CHECK(rep.p_chosen > 1.0);
  CHECK(rep.p_chosen < 1.5);
  for (const auto& c : rep.conditions) CHECK_MESSAGE(c.pass, c.name);

  WellposednessInputs in;
  in.alpha0_minus = 0.8;
  in.beta_plus = 1.0;
  in.k_samples = rep.k_samples;
  in.delta_g = 1.0;
  in.rho = 0.5;
  in.rho0 = 0.5;
  const auto bad = check_wellposedness(in, m.nu2);
  CHECK_FALSE(bad.verdict);
  CHECK_FALSE(bad.condition("index_ratio").pass);

  in.alpha0_minus = 1.5;
  in.delta_g = 0.0;
  const auto rough = check_wellposedness(in, m.nu2);
  CHECK_FALSE(rough.condition("g_regularity").pass);
  CHECK(rough.condition("index_ratio").pass);
  in.delta_g = 0.3;
  CHECK(check_wellposedness(in, m.nu2).condition("g_regularity").pass);
}
