#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "doctest.h"
#include "levyfilter/particle_filter.hpp"

using namespace levyfilter;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

ModelSpec base_model(LevyCopula c = LevyCopula::clayton(2.0, true)) {
  ModelSpec m(LevyMeasure::exponential(2.0), LevyMeasure::exponential(2.0), c);
  m.sensor = SensorSpec::zero();
  m.drift = DriftSpec::zero();
  m.epsilon = 0.05;
  return m;
}

struct Moments {
  double n = 0, s = 0, s2 = 0;
  void add(double x) {
    n += 1;
    s += x;
    s2 += x * x;
  }
  double mean() const { return s / n; }
  double var() const { return (s2 / n - mean() * mean()) * n / (n - 1); }
  double se() const { return std::sqrt(var() / n); }
};

// d/dv of w (u^{-theta} + v^{-theta}) raised to -1/theta, written out directly
double clayton_du2(double theta, double w, double u1, double u2) {
  return w * std::pow(u2, -theta - 1.0) *
         std::pow(w * std::pow(u1, -theta) + w * std::pow(u2, -theta), -1.0 / theta - 1.0);
}

}  // namespace

TEST_CASE("zero dynamics leave particles in place") {
  // Clayton couples every signal jump to an observed one and there is no L0
  ParticleFilter pf(base_model(), 200, 0.01, 5);
  auto e = pf.initial();
  const auto x0 = e.x;
  pf.propagate(e, 0, pf.draw_L0_increments(0));
  CHECK(e.x == x0);
}

TEST_CASE("linear drift moves every particle by one Euler step") {
  auto m = base_model();
  m.drift = DriftSpec::linear(-2.0, 0.5);
  ParticleFilter pf(m, 100, 0.01, 6);
  auto e = pf.initial();
  const auto x0 = e.x;
  pf.propagate(e, 3, std::vector<double>(100, 0.0));
  for (std::size_t i = 0; i < 100; ++i) CHECK(e.x[i] == doctest::Approx(x0[i] + (0.5 - 2.0 * x0[i]) * 0.01).epsilon(1e-14));
}

TEST_CASE("fixed seed is deterministic") {
  auto m = base_model();
  m.l0 = make_l0(1.5);
  m.sensor = SensorSpec::gaussian_bump();
  m.drift = DriftSpec::linear(-1.0);
  const auto path = simulate_path(m, 0.5, 0.01, 17);
  const std::vector<double> th{0.0, 0.5};
  const auto a = ParticleFilter(m, 500, 0.01, 3).run(path, th);
  const auto b = ParticleFilter(m, 500, 0.01, 3).run(path, th);
  const auto c = ParticleFilter(m, 500, 0.01, 4).run(path, th);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].mean == b.rows[k].mean);
    CHECK(a.rows[k].p_exceed == b.rows[k].p_exceed);
  }
  CHECK(a.rows.back().mean != c.rows.back().mean);
}

TEST_CASE("weight update") {
  ParticleFilter z(base_model(), 300, 0.01, 1);
  auto e = z.initial();
  const auto w0 = e.log_weights;
  CHECK(z.weight_update(e, 0.4, 0.01) == 0.0);
  CHECK(e.log_weights == w0);

  auto m = base_model();
  m.sensor = SensorSpec::constant(1.3);
  ParticleFilter c(m, 300, 0.01, 1);
  auto f = c.initial();
  const double lse = c.weight_update(f, 0.2, 0.01);
  CHECK(lse == doctest::Approx(1.3 * 0.2 - 0.5 * 1.69 * 0.01).epsilon(1e-12));
  for (double l : f.log_weights) CHECK(l == doctest::Approx(-std::log(300.0)).epsilon(1e-12));
  CHECK(f.ess() == doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("one observation step matches Bayes' rule") {
  // prior N(0,1), likelihood exp(g dY - g^2 dt / 2) with a Gaussian bump g
  auto m = base_model();
  m.sensor = SensorSpec::gaussian_bump(1.0, 0.5, 1.0);
  const double dY = 0.8, dt = 0.05;
  auto lik = [&](double x) {
    const double g = m.sensor(x);
    return std::exp(g * dY - 0.5 * g * g * dt) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  };
  const double Z = GK::integrate(lik, -12.0, 12.0, 10, 1e-13);
  const double mu = GK::integrate([&](double x) { return x * lik(x); }, -12.0, 12.0, 10, 1e-13) / Z;

  const std::size_t n = 100000;
  ParticleFilter pf(m, n, dt, 2);
  auto e = pf.initial();
  const double lse = pf.weight_update(e, dY, dt);
  CHECK(std::exp(lse) == doctest::Approx(Z).epsilon(3e-3));
  // delta-method standard error of the self-normalised mean
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(std::exp(e.log_weights[i]) * (e.x[i] - mu), 2);
  CHECK(std::abs(e.mean() - mu) < 3.0 * std::sqrt(s));
}

TEST_CASE("jump update") {
  const auto ex = LevyMeasure::exponential(1.0);
  ModelSpec cd(ex, ex, LevyCopula::complete_dependence());
  cd.sensor = SensorSpec::zero();
  ParticleFilter pf(cd, 100, 0.01, 7);
  auto e = pf.initial();
  const auto x0 = e.x;
  const auto law = conditional_law(cd.copula, cd.nu1, cd.nu2, 0.7);
  pf.jump_update(e, law, 0, 0);
  for (std::size_t i = 0; i < 100; ++i) CHECK(e.x[i] - x0[i] == doctest::Approx(0.7).epsilon(1e-9));

  // Clayton: the mean displacement is the mean of the normalised law,
  // which is int_0^inf S(z) dz / S(0) with S(z) = dH/du2(U1(z), U2(z2))
  const auto m = base_model();
  const double z2 = 0.3, u2 = 2.0 * std::exp(-z2);
  auto S = [&](double z) { return clayton_du2(2.0, 0.5, 2.0 * std::exp(-z), u2); };
  const double expect = GK::integrate(S, 0.0, 60.0, 12, 1e-12) / S(0.0);
  const std::size_t n = 100000;
  ParticleFilter pc(m, n, 0.01, 8);
  auto f = pc.initial();
  const auto y0 = f.x;
  pc.jump_update(f, conditional_law(m.copula, m.nu1, m.nu2, z2), 0, 0);
  Moments d;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f.x[i] - y0[i];
    CHECK(v >= 0.0);
    d.add(v);
  }
  CHECK(std::abs(d.mean() - expect) < 3.0 * d.se());
}

TEST_CASE("systematic resampling") {
  ParticleFilter pf(base_model(), 1000, 0.01, 9);
  auto e = pf.initial();
  CHECK(e.ess() == doctest::Approx(1000.0).epsilon(1e-12));
  const auto x0 = e.x;
  CHECK_FALSE(pf.resample_systematic(e, 0));
  CHECK(e.x == x0);

  // weights proportional to (1 + x^2) on fixed points; resampled averages are unbiased
  std::vector<double> lw(1000);
  double zsum = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    lw[i] = std::log1p(x0[i] * x0[i]);
    zsum += std::exp(lw[i]);
  }
  double target = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) target += std::exp(lw[i]) / zsum * x0[i];
  Moments avg;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    ParticleEnsemble w{x0, lw};
    w.normalize();
    REQUIRE(pf.resample_systematic(w, 1.01, derive_seed(99, r)));
    double s = 0.0;
    for (double x : w.x) s += x;
    avg.add(s / 1000.0);
    CHECK(w.ess() == doctest::Approx(1000.0).epsilon(1e-12));
  }
  CHECK(std::abs(avg.mean() - target) < 3.0 * avg.se() + 1e-12);
}

TEST_CASE("without observation information the filter is the prior") {
  auto m = base_model(LevyCopula::independence());
  m.l0 = make_l0(1.5);
  m.drift = DriftSpec::linear(-1.0);
  m.x0 = InitialLaw::gaussian(0.5, 0.5);
  const double T = 1.0, dt = 0.01;
  PathRecord flat;
  flat.dt = dt;
  for (std::size_t k = 0; k <= 100; ++k) flat.t.push_back(k * dt);
  flat.X.assign(101, 0.0);
  flat.Y = flat.X;
  flat.Yc = flat.X;
  flat.dW.assign(100, 0.0);

  const std::size_t n = 20000;
  ParticleEnsemble fin;
  const std::vector<double> th{0.5};
  ParticleFilter(m, n, dt, 10).run(flat, th, &fin);
  Moments pf;
  for (double x : fin.x) pf.add(x);

  Moments mc;
  for (std::uint64_t r = 0; r < 20000; ++r) mc.add(simulate_path(m, T, dt, path_seed(33, r)).X.back());
  CHECK(std::abs(pf.mean() - mc.mean()) < 3.0 * std::hypot(pf.se(), mc.se()));
}

TEST_CASE("Monte Carlo variance falls like 1/N") {
  auto m = base_model();
  m.l0 = make_l0(1.5);
  m.sensor = SensorSpec::gaussian_bump();
  m.drift = DriftSpec::linear(-1.0);
  const double dt = 0.02;
  const auto path = simulate_path(m, 0.4, dt, 44);
  const std::vector<double> th{0.0};
  Moments small, big;
  for (std::uint64_t r = 0; r < 400; ++r) {
    small.add(ParticleFilter(m, 250, dt, derive_seed(1, r)).run(path, th).rows.back().mean);
    big.add(ParticleFilter(m, 1000, dt, derive_seed(2, r)).run(path, th).rows.back().mean);
  }
  const double ratio = small.var() / big.var();
  MESSAGE("variance ratio " << ratio);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("construction errors") {
  auto m = base_model();
  CHECK_THROWS_AS(ParticleFilter(m, 0, 0.01, 1), DomainError);
  CHECK_THROWS_AS(ParticleFilter(m, 10, 0.0, 1), DomainError);
  m.sensor = SensorSpec::linear(1.0);
  CHECK_THROWS_AS(ParticleFilter(m, 10, 0.01, 1), DomainError);
  const auto path = simulate_path(base_model(), 0.1, 0.01, 1);
  const std::vector<double> th{0.0};
  CHECK_THROWS_AS(ParticleFilter(base_model(), 10, 0.02, 1).run(path, th), DomainError);
}
