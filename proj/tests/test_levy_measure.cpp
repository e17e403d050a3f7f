#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "levyfilter/levy_measure.hpp"

using namespace levyfilter;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent oracle for the tempered-stable tail: tanh-sinh on [z, 1] and
// exp-sinh on [1, inf), split at x = 1.
double ts_tail_oracle(double beta, double z) {
  auto f = [beta](double x) { return std::pow(x, -beta - 1.0) * std::exp(-x); };
  boost::math::quadrature::exp_sinh<double> es;
  boost::math::quadrature::tanh_sinh<double> ts;
  double right = es.integrate(f, 1.0, kInf, 1e-12);
  if (z >= 1.0) return es.integrate(f, z, kInf, 1e-12);
  return ts.integrate(f, z, 1.0, 1e-12) + right;
}

// Closed form for beta = 1/2: Gamma(-1/2, z) = 2 z^{-1/2} e^{-z} - 2 sqrt(pi) erfc(sqrt z).
double ts_half_closed(double z) {
  return 2.0 / std::sqrt(z) * std::exp(-z) - 2.0 * std::sqrt(M_PI) * std::erfc(std::sqrt(z));
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
  }
  return d;
}

}  // namespace

TEST_CASE("exponential tail is closed form") {
  const auto m = LevyMeasure::exponential(1.0);
  CHECK(m.tail_integral(1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(m.tail_integral(kInf) == 0.0);
  CHECK(m.tail_integral(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  const auto m2 = LevyMeasure::exponential(3.0, 0.5);
  for (double z : {0.01, 0.3, 2.0, 7.5})
    CHECK(m2.tail_integral(z) == doctest::Approx(3.0 * std::exp(-z / 0.5)).epsilon(1e-10));
}

TEST_CASE("tail at infinity vanishes for every family") {
  const auto a = LevyMeasure::tempered_stable(0.5);
  const auto b = LevyMeasure::tempered_stable(1.5, Support::full_line);
  const auto c = LevyMeasure::tabulated({0.0, 1.0, 2.0}, {1.0, 1.0, 0.0});
  for (const auto* m : {&a, &b, &c}) {
    CHECK(m->tail_integral(kInf) == 0.0);
    if (m->support() == Support::full_line) CHECK(m->tail_integral(-kInf) == 0.0);
  }
  CHECK(a.tail_integral(0.0) == kInf);
}

TEST_CASE("tempered-stable tail matches quadrature oracle") {
  const auto m = LevyMeasure::tempered_stable(0.5);
  CHECK(ts_tail_oracle(0.5, 0.5) == doctest::Approx(ts_half_closed(0.5)).epsilon(1e-10));
  for (double z : {1e-5, 1e-3, 0.05, 0.5, 1.0, 3.0, 12.0})
    CHECK(m.tail_integral(z) == doctest::Approx(ts_tail_oracle(0.5, z)).epsilon(1e-8));
  const auto m15 = LevyMeasure::tempered_stable(1.5);
  for (double z : {1e-3, 0.2, 2.0})
    CHECK(m15.tail_integral(z) == doctest::Approx(ts_tail_oracle(1.5, z)).epsilon(1e-8));
}

TEST_CASE("full-line tail is negative on the left") {
  const auto m = LevyMeasure::tempered_stable(1.5, Support::full_line);
  CHECK(m.tail_integral(-0.3) == doctest::Approx(-m.tail_integral(0.3)).epsilon(1e-14));
  CHECK(m.tail_integral(0.3) == doctest::Approx(ts_tail_oracle(1.5, 0.3)).epsilon(1e-8));
}

TEST_CASE("tabulated tail integrates the piecewise-linear density") {
  // triangle 2(1 - z) on [0, 1]: U(z) = (1 - z)^2
  const auto m = LevyMeasure::tabulated({0.0, 0.5, 1.0}, {2.0, 1.0, 0.0});
  CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
  for (double z : {0.1, 0.5, 0.8}) CHECK(m.tail_integral(z) == doctest::Approx((1 - z) * (1 - z)).epsilon(1e-12));
  CHECK(m.inverse_tail(0.25) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("inverse tail") {
  const auto e = LevyMeasure::exponential(1.0);
  CHECK(e.inverse_tail(std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-10));
  // u = lambda maps to the lower table edge
  CHECK(e.inverse_tail(1.0) <= e.table_lo() * (1 + 1e-12));
  CHECK(e.inverse_tail(1.0) >= 0.0);

  const auto m = LevyMeasure::tempered_stable(0.5);
  CHECK(m.inverse_tail(ts_tail_oracle(0.5, 0.5)) == doctest::Approx(0.5).epsilon(1e-8));
  for (double z : {1e-4, 0.02, 2.0, 9.0})
    CHECK(m.inverse_tail(m.tail_integral(z)) == doctest::Approx(z).epsilon(1e-9));
  CHECK_THROWS_AS(m.inverse_tail(-1.0), RangeError);
}

TEST_CASE("truncated mass") {
  const auto e = LevyMeasure::exponential(1.0);
  CHECK(e.truncated_mass(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.truncated_mass(1e-12) == doctest::Approx(1.0).epsilon(1e-10));

  const auto m = LevyMeasure::tempered_stable(0.5);
  CHECK(m.truncated_mass(0.1) == doctest::Approx(ts_tail_oracle(0.5, 0.1)).epsilon(1e-8));
  CHECK_THROWS_AS(m.truncated_mass(0.0), DomainError);

  const auto s = LevyMeasure::tempered_stable(1.5, Support::full_line);
  CHECK(s.truncated_mass(0.1) == doctest::Approx(2.0 * ts_tail_oracle(1.5, 0.1)).epsilon(1e-8));

  double prev = kInf;
  for (double eps = 1e-4; eps < 5.0; eps *= 1.7) {
    const double lam = m.truncated_mass(eps);
    CHECK(lam <= prev);
    prev = lam;
  }
}

TEST_CASE("jump sampler matches the truncated law") {
  const auto m = LevyMeasure::tempered_stable(0.5);
  const double eps = 0.05;
  const double lam = ts_tail_oracle(0.5, eps);
  Rng rng(12345);
  std::vector<double> xs(100000);
  for (double& x : xs) x = m.sample_jump_size(eps, rng);
  CHECK(*std::min_element(xs.begin(), xs.end()) > eps);
  const double d = ks_statistic(xs, [&](double z) { return 1.0 - ts_half_closed(z) / lam; });
  CHECK(d < 0.01);

  const auto e = LevyMeasure::exponential(1.0);
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = e.sample_jump_size(0.0, rng);
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("sampler is reproducible") {
  const auto m = LevyMeasure::tempered_stable(1.5, Support::full_line);
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(m.sample_jump_size(0.05, a) == m.sample_jump_size(0.05, b));
}

TEST_CASE("small-jump integrability") {
  const auto half = LevyMeasure::tempered_stable(0.5).check_small_jump_integrability();
  CHECK(half.finite);
  // int_0^1 z^{-1/2} e^{-z} dz = sqrt(pi) erf(1)
  CHECK(half.value == doctest::Approx(std::sqrt(M_PI) * std::erf(1.0)).epsilon(1e-3));

  const auto wide = LevyMeasure::tempered_stable(1.5).check_small_jump_integrability();
  CHECK_FALSE(wide.finite);

  CHECK(LevyMeasure::exponential(2.0).check_small_jump_integrability().finite);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(LevyMeasure::exponential(-1.0), DomainError);
  CHECK_THROWS_AS(LevyMeasure::tempered_stable(2.0), DomainError);
  CHECK_THROWS_AS(LevyMeasure::tabulated({0.0, 1.0}, {1.0, -1.0}), DomainError);
}
