#include <cstdlib>
#include <string>

#include "doctest.h"
#include "levyfilter/config.hpp"

using namespace levyfilter;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int line_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("empty text gives the benchmark defaults") {
  const auto c = parse_config("# nothing\n\n");
  CHECK(c.grid_n == 1024);
  CHECK(c.grid_l == 20.0);
  CHECK(c.epsilon == 0.05);
  CHECK(c.copula_theta == 2.0);
  CHECK(c.copula_half_weights);
  CHECK(c.nu1.rate == 2.0);
  CHECK(c.l0_alpha == 1.5);
  CHECK(c.thresholds == std::vector<double>{0.5});
  const auto m = build_model(c);
  CHECK(m.copula.family() == CopulaFamily::clayton);
  CHECK(m.l0.has_value());
  CHECK(m.drift(2.0) == -2.0);
  CHECK(m.sensor(0.0) == 1.0);
  CHECK(build_grid(c).n == 1024);
}

TEST_CASE("the documented defaults parse back to the defaults") {
  const auto c = parse_config(default_config_text());
  const RunConfig d;
  CHECK(c.grid_n == d.grid_n);
  CHECK(c.dt == d.dt);
  CHECK(c.pf_particles == d.pf_particles);
  CHECK(c.output_filter == d.output_filter);
}

TEST_CASE("values and comments") {
  const auto c = parse_config(
      "model.copula.theta = 0.7   # weaker dependence\n"
      "model.nu1.family = tempered_stable\n"
      "model.nu1.beta = 0.3\n"
      "grid.n = 512\n"
      "thresholds = 0, 1.5, -2\n"
      "model.copula.half_weights = false\n"
      "filter.engine = pf\n");
  CHECK(c.copula_theta == 0.7);
  CHECK(c.nu1.family == "tempered_stable");
  CHECK(c.nu1.beta == 0.3);
  CHECK(c.grid_n == 512);
  CHECK(c.thresholds == std::vector<double>{0.0, 1.5, -2.0});
  CHECK_FALSE(c.copula_half_weights);
  CHECK(c.engine == "pf");
}

TEST_CASE("constraint violations name the key") {
  const auto theta = message_of("model.copula.theta = -1\n");
  CHECK(contains(theta, "model.copula.theta"));
  CHECK(contains(theta, "theta must be > 0"));
  CHECK(line_of("\n\nmodel.copula.theta = -1\n") == 3);

  const auto grid = message_of("grid.n = 1000\n");
  CHECK(contains(grid, "grid.n"));
  CHECK(contains(grid, "must be a power of two"));

  CHECK(contains(message_of("model.l0.alpha = 2.5\n"), "alpha must lie in (1, 2)"));
  CHECK(contains(message_of("model.epsilon = 0\n"), "epsilon must be > 0"));
  CHECK(contains(message_of("sim.dt = 2\n"), "dt must not exceed T"));
}

TEST_CASE("malformed input") {
  const auto unknown = message_of("a = 1\nmodel.bogus = 3\n");
  CHECK(contains(unknown, "line 1"));
  CHECK(contains(unknown, "unknown key"));

  const auto mismatch = message_of("# header\ngrid.l = wide\n");
  CHECK(contains(mismatch, "line 2"));
  CHECK(contains(mismatch, "grid.l"));
  CHECK(contains(mismatch, "expected a number"));

  CHECK(contains(message_of("grid.n = -4\n"), "nonnegative integer"));
  CHECK(contains(message_of("model.copula.half_weights = maybe\n"), "expected true or false"));
  CHECK(contains(message_of("grid.n = 512\ngrid.n = 256\n"), "duplicate key"));
  CHECK(contains(message_of("grid.n =\n"), "missing value"));
  CHECK(contains(message_of("grid.n 512\n"), "expected 'key = value'"));
  CHECK(contains(message_of("model.copula.family = gumbel\n"), "unknown value 'gumbel'"));
  CHECK_THROWS_AS(load_config("/nonexistent/levyfilter.cfg"), ConfigError);
}

TEST_CASE("naming a family makes its parameters mandatory") {
  const auto m = message_of("model.copula.family = clayton\n");
  CHECK(contains(m, "model.copula.theta"));
  CHECK(contains(m, "missing mandatory key"));
  CHECK(contains(message_of("model.nu2.family = exponential\n"), "model.nu2.rate"));
  CHECK(contains(message_of("model.nu1.family = tempered_stable\n"), "model.nu1.beta"));
  CHECK_NOTHROW(parse_config("model.copula.family = clayton\nmodel.copula.theta = 1\n"));
  CHECK_NOTHROW(parse_config("model.copula.family = independence\n"));
}

TEST_CASE("overrides") {
  const auto c = parse_config("grid.n = 512\n", {{"grid.n", "256"}, {"sim.seed", "9"}});
  CHECK(c.grid_n == 256);
  CHECK(c.seed == 9);
  CHECK_THROWS_AS(parse_config("", {{"grid.size", "2"}}), ConfigError);
  try {
    parse_config("", {{"grid.n", "100"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 0);
    CHECK(e.key() == "grid.n");
  }
}

TEST_CASE("seed from the environment") {
  ::setenv(kSeedEnv, "4242", 1);
  CHECK(parse_config("").seed == 4242);
  CHECK(parse_config("sim.seed = 7\n").seed == 7);
  ::setenv(kSeedEnv, "abc", 1);
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  ::unsetenv(kSeedEnv);
  CHECK(parse_config("").seed == RunConfig{}.seed);
}
