#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "levyfilter/levy_copula.hpp"

using namespace levyfilter;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clayton written out directly, as an oracle for the library's log-space form.
double clayton_H(double theta, double w, double u1, double u2) {
  return std::pow(w * std::pow(u1, -theta) + w * std::pow(u2, -theta), -1.0 / theta);
}

double fd_mixed(const LevyCopula& c, double u1, double u2) {
  const double h1 = 1e-4 * u1, h2 = 1e-4 * u2;
  return (c.eval(u1 + h1, u2 + h2) - c.eval(u1 + h1, u2 - h2) - c.eval(u1 - h1, u2 + h2) +
          c.eval(u1 - h1, u2 - h2)) /
         (4.0 * h1 * h2);
}

double fd_du2(const LevyCopula& c, double u1, double u2) {
  const double h = 1e-5 * u2;
  return (c.eval(u1, u2 + h) - c.eval(u1, u2 - h)) / (2.0 * h);
}

template <class F>
double gk(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-11);
}

}  // namespace

TEST_CASE("copula values") {
  CHECK(LevyCopula::clayton(1.0, true).eval(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(LevyCopula::independence().eval(0.7, kInf) == 0.7);
  CHECK(LevyCopula::independence().eval(kInf, 0.3) == 0.3);
  CHECK(LevyCopula::independence().eval(0.7, 2.0) == 0.0);
  CHECK(LevyCopula::complete_dependence().eval(3.0, 2.0) == 2.0);
  for (double th : {0.5, 1.0, 2.0, 5.0})
    for (bool half : {true, false}) {
      const auto c = LevyCopula::clayton(th, half);
      for (double u1 : {0.03, 0.8, 7.0})
        for (double u2 : {0.2, 3.0})
          CHECK(c.eval(u1, u2) == doctest::Approx(clayton_H(th, half ? 0.5 : 1.0, u1, u2)).epsilon(1e-13));
      // margins: H(u, inf) = w^{-1/theta} u
      CHECK(c.eval(2.0, kInf) == doctest::Approx(2.0 * std::pow(half ? 2.0 : 1.0, 1.0 / th)).epsilon(1e-13));
    }
  CHECK_THROWS_AS(LevyCopula::clayton(-1.0), DomainError);
  CHECK_THROWS_AS(LevyCopula::clayton(1.0).eval(-1.0, 1.0), DomainError);
}

TEST_CASE("mixed density against finite differences") {
  CHECK(LevyCopula::clayton(1.0, true).mixed_density(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double th : {0.5, 1.0, 2.0, 5.0}) {
    const auto c = LevyCopula::clayton(th, true);
    for (double u : {0.3, 1.0, 4.0})
      CHECK(c.mixed_density(u, u) == doctest::Approx(0.25 * (1 + th) / u).epsilon(1e-12));
  }
  const auto c2 = LevyCopula::clayton(2.0, true);
  CHECK(c2.mixed_density(1.0, 4.0) == doctest::Approx(fd_mixed(c2, 1.0, 4.0)).epsilon(1e-6));

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double u1 = std::pow(10.0, 6.0 * uniform_open(rng) - 3.0);
    const double u2 = std::pow(10.0, 6.0 * uniform_open(rng) - 3.0);
    CHECK(LevyCopula::clayton(1.3, i % 2 == 0).mixed_density(u1, u2) >= 0.0);
  }
}

TEST_CASE("dH/du2 against finite differences") {
  for (bool half : {true, false}) {
    const auto c = LevyCopula::clayton(1.5, half);
    for (double u1 : {0.1, 1.0, 20.0})
      for (double u2 : {0.05, 2.0})
        CHECK(c.d_du2(u1, u2) == doctest::Approx(fd_du2(c, u1, u2)).epsilon(1e-7));
    CHECK(c.d_du2(kInf, 0.7) == doctest::Approx(std::pow(half ? 2.0 : 1.0, 1.0 / 1.5)).epsilon(1e-13));
  }
}

TEST_CASE("joint tail") {
  const auto e = LevyMeasure::exponential(1.0);
  CHECK(joint_tail(LevyCopula::independence(), e, e, 0.5, 0.2) == 0.0);
  for (double z : {0.1, 1.0, 3.0})
    CHECK(joint_tail(LevyCopula::complete_dependence(), e, e, z, z) == doctest::Approx(e.tail_integral(z)).epsilon(1e-14));
  // harmonic mean (e/2 + e/2)^{-1}
  CHECK(joint_tail(LevyCopula::clayton(1.0, true), e, e, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("survival copula of a finite pair") {
  const auto s = survival_copula_finite(LevyCopula::clayton(1.0, true), 2.0, 2.0);
  CHECK(s.lambda_h == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const auto s1 = survival_copula_finite(LevyCopula::clayton(1.0, true), 1.0, 1.0);
  CHECK(s1(0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(s1(0.5, 1.0) == doctest::Approx(clayton_H(1.0, 0.5, 0.5, 1.0) / clayton_H(1.0, 0.5, 1.0, 1.0)).epsilon(1e-14));
  CHECK(survival_copula_finite(LevyCopula::independence(), 1.0, 1.0).lambda_h == 0.0);
}

TEST_CASE("scaling check") {
  const std::vector<double> gammas{0.01, 0.5, 3.0, 100.0};
  CHECK(scaling_check(LevyCopula::clayton(2.0, true), gammas) < 1e-12);
  // w = 1: H(1, 1) = 2^{-1/theta}, so the ratio form only holds for H / H(1, 1)
  const auto std07 = LevyCopula::clayton(0.7, false);
  const double h11 = std07.eval(1.0, 1.0);
  CHECK(scaling_check([&](double u, double v) { return std07.eval(u, v) / h11; }, gammas) < 1e-12);
  CHECK(scaling_check(std07, gammas) > 0.1);
  CHECK(scaling_check(LevyCopula::complete_dependence(), gammas) < 1e-12);
  const auto c = LevyCopula::clayton(1.0, true);
  const double dev = scaling_check([&](double u, double v) { return c.eval(u, v) + 0.3; }, gammas);
  CHECK(dev > 0.05);
}

TEST_CASE("conditional law mass equals dH/du2 and the quadrature of h f1") {
  const auto m1 = LevyMeasure::exponential(2.0);
  const auto m2 = LevyMeasure::exponential(2.0);
  for (bool half : {true, false}) {
    const auto c = LevyCopula::clayton(1.0, half);
    for (double z2 : {0.05, 0.5, 2.0}) {
      const auto law = conditional_law(c, m1, m2, z2);
      const double u2 = 2.0 * std::exp(-z2);
      // h(U1(z), u2) f1(z) with U1(z) = 2 e^{-z}, f1(z) = 2 e^{-z}
      const double q = gk([&](double z) {
        const double u1 = 2.0 * std::exp(-z);
        return fd_mixed(c, u1, u2) * 2.0 * std::exp(-z);
      }, 0.0, 60.0);
      CHECK(law.raw_mass() == doctest::Approx(fd_du2(c, 2.0, u2)).epsilon(1e-6));
      CHECK(law.raw_mass() == doctest::Approx(q).epsilon(1e-5));
      CHECK(law.cdf(1e300) == 1.0);
    }
  }
}

TEST_CASE("conditional law of an infinite-activity margin has unit mass") {
  const auto m1 = LevyMeasure::tempered_stable(0.5);
  const auto c = LevyCopula::clayton(1.0, false);
  const auto law = conditional_law(c, m1, m1, 0.3);
  CHECK(law.raw_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("large theta concentrates at the matched-tail point") {
  const auto m1 = LevyMeasure::exponential(1.0);
  const auto m2 = LevyMeasure::exponential(1.0, 2.0);
  const double z2 = 0.7;
  const double target = m1.inverse_tail(m2.tail_integral(z2));
  const auto law = conditional_law(LevyCopula::clayton(20.0, true), m1, m2, z2);
  Rng rng(17);
  std::vector<double> xs(20001);
  for (double& x : xs) x = law.sample(rng);
  std::nth_element(xs.begin(), xs.begin() + 10000, xs.end());
  CHECK(std::abs(xs[10000] - target) < 0.05 * target);
}

TEST_CASE("small theta: normalised shape tends to U1^{-1/2} f1, raw mass to zero") {
  // Clayton with w = 1: h(u1, u2) -> 2^{-1/theta} (u1 u2)^{-1/2} as theta -> 0,
  // so the normalised law is proportional to U1^{-1/2} f1 = e^{-z/2}.
  const auto m = LevyMeasure::exponential(1.0);
  const auto law = conditional_law(LevyCopula::clayton(0.05, false), m, m, 0.5);
  CHECK(law.raw_mass() < 1e-5);
  const double l1 = gk([&](double z) {
    const double lim = 0.5 * std::exp(-0.5 * z);
    return std::abs(law.density(z) / law.raw_mass() - lim);
  }, 1e-9, 80.0);
  CHECK(l1 < 0.05);
  // the unnormalised nu1 shape e^{-z} is far from it
  const double l1_nu1 = gk([&](double z) {
    return std::abs(law.density(z) / law.raw_mass() - std::exp(-z));
  }, 1e-9, 80.0);
  CHECK(l1_nu1 > 0.2);
}

TEST_CASE("conditional sampler against quadratured cdf") {
  const auto m1 = LevyMeasure::exponential(2.0);
  const auto c = LevyCopula::clayton(2.0, true);
  const double z2 = 0.4;
  const double u2 = 2.0 * std::exp(-z2);
  const auto law = conditional_law(c, m1, m1, z2);
  auto dens = [&](double z) {
    const double u1 = 2.0 * std::exp(-z);
    const double w = 0.5, th = 2.0;
    const double s = w * std::pow(u1, -th) + w * std::pow(u2, -th);
    return (1 + th) * w * w * std::pow(u1 * u2, -th - 1) * std::pow(s, -1 / th - 2) * 2.0 * std::exp(-z);
  };
  const double total = gk(dens, 0.0, 60.0);
  CHECK(total == doctest::Approx(law.raw_mass()).epsilon(1e-9));

  Rng rng(2024);
  const std::size_t n = 100000;
  std::vector<double> xs(n);
  for (double& x : xs) x = law.sample(rng);
  CHECK(*std::min_element(xs.begin(), xs.end()) >= 0.0);
  CHECK(*std::max_element(xs.begin(), xs.end()) <= m1.table_hi());
  std::sort(xs.begin(), xs.end());
  // oracle cdf at every 100th order statistic; gaps add at most 1e-3
  double d = 0.0, prev_z = 0.0, cum = 0.0;
  for (std::size_t i = 99; i < n; i += 100) {
    cum += gk(dens, prev_z, xs[i]);
    prev_z = xs[i];
    const double F = cum / total;
    d = std::max({d, std::abs(F - static_cast<double>(i) / n), std::abs(F - static_cast<double>(i + 1) / n)});
  }
  CHECK(d < 0.01);

  Rng a(5), b(5);
  for (int i = 0; i < 50; ++i) CHECK(law.sample(a) == law.sample(b));
}

TEST_CASE("conditional law cdf, quantile and mean") {
  const auto m1 = LevyMeasure::tempered_stable(0.5);
  const auto law = conditional_law(LevyCopula::clayton(1.0, false), m1, m1, 0.2);
  for (double u : {0.01, 0.3, 0.9, 0.999}) {
    CHECK(law.cdf(law.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
    CHECK(law.exact_quantile(u) == doctest::Approx(law.quantile(u)).epsilon(1e-4));
  }
  const auto c = LevyCopula::clayton(1.7, true);
  for (double y : {0.01, 0.4, 1.2})
    CHECK(c.d_du2(c.inverse_d_du2(y, 0.3), 0.3) == doctest::Approx(y).epsilon(1e-12));
  const double mean = gk([&](double z) { return z * law.density(z); }, 0.0, 1.0) +
                      gk([&](double z) { return z * law.density(z); }, 1.0, 60.0);
  CHECK(law.mean() == doctest::Approx(mean / law.raw_mass()).epsilon(1e-3));
  CHECK(std::abs(law.characteristic(0.0) - std::complex<double>(1.0, 0.0)) < 1e-14);
}

TEST_CASE("complete dependence is an atom at the matched tail") {
  const auto e = LevyMeasure::exponential(1.0);
  const auto law = conditional_law(LevyCopula::complete_dependence(), e, e, 0.8);
  CHECK(law.point_mass());
  CHECK(law.atom() == doctest::Approx(0.8).epsilon(1e-10));
  Rng rng(1);
  CHECK(law.sample(rng) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("unsupported and out-of-range conditional laws") {
  const auto e = LevyMeasure::exponential(1.0);
  CHECK_THROWS_AS(conditional_law(LevyCopula::independence(), e, e, 0.5), UnsupportedError);
  CHECK_THROWS_AS(conditional_law(LevyCopula::clayton(1.0, true, 0.5), e, e, 0.5), UnsupportedError);
  CHECK_THROWS_AS(conditional_law(LevyCopula::clayton(1.0), e, e, -0.5), RangeError);
}
