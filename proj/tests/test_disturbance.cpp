#include <doctest.h>

#include <cmath>

#include "helm/disturbance.hpp"

using namespace helm;

namespace {

DisturbanceConfig quiet_config() {
  DisturbanceConfig c;
  c.wind = {Vec3::Zero(), Vec3::Zero(), 60.0};
  c.wave = {Vec3::Zero(), Vec3::Zero(), 8.0};
  c.current = {Vec3::Zero(), Vec3::Zero(), 120.0};
  c.d_max = 1000.0;
  c.seed = 9;
  return c;
}

DisturbanceConfig stochastic_config() {
  DisturbanceConfig c;
  c.wind = {Vec3(2000.0, 1000.0, 0.0), Vec3(600.0, 600.0, 2000.0), 60.0};
  c.wave = {Vec3(1500.0, 800.0, 0.0), Vec3(800.0, 800.0, 3000.0), 8.0};
  c.current = {Vec3(1000.0, 600.0, 0.0), Vec3(200.0, 200.0, 800.0), 120.0};
  c.d_max = 10e3;
  c.seed = 4242;
  return c;
}

}  // namespace

TEST_SUITE("disturbance") {

TEST_CASE("silent config produces exactly zero forever") {
  DisturbanceProcess p = make_disturbance(quiet_config());
  for (int k = 0; k < 1000; ++k) {
    const DisturbanceSample s = p.sample(0.1 * k, 0.1);
    CHECK(s.total.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.wind.cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(s.clipped);
  }
  CHECK(p.clip_count() == 0);
}

TEST_CASE("pure mean config passes the mean through") {
  DisturbanceConfig c = quiet_config();
  c.wind.mean = Vec3(500.0, 0.0, 0.0);
  DisturbanceProcess p = make_disturbance(c);
  for (int k = 0; k < 100; ++k) {
    const DisturbanceSample s = p.sample(0.1 * k, 0.1);
    CHECK(s.total(0) == 500.0);
    CHECK(s.total(1) == 0.0);
    CHECK(s.total(2) == 0.0);
  }
}

TEST_CASE("identical seeds give identical sequences") {
  const DisturbanceConfig c = stochastic_config();
  DisturbanceProcess a = make_disturbance(c);
  DisturbanceProcess b = make_disturbance(c);
  for (int k = 0; k < 2000; ++k) {
    const DisturbanceSample sa = a.sample(0.1 * k, 0.1);
    const DisturbanceSample sb = b.sample(0.1 * k, 0.1);
    CHECK((sa.total - sb.total).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sa.wind - sb.wind).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sa.wave - sb.wave).cwiseAbs().maxCoeff() == 0.0);
    CHECK((sa.current - sb.current).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("total stays within d_max over 1e5 samples") {
  DisturbanceProcess p = make_disturbance(stochastic_config());
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const DisturbanceSample s = p.sample(0.1 * k, 0.1);
    worst = std::max(worst, s.total.norm());
    // Attribution is exact by construction, clipped or not.
    CHECK((s.total - (s.wind + s.wave + s.current)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(worst <= 10e3);
}

TEST_CASE("a tight d_max clips radially and counts events") {
  DisturbanceConfig c = stochastic_config();
  c.d_max = 3000.0;  // below the mean sum, clips every step
  DisturbanceProcess p = make_disturbance(c);
  for (int k = 0; k < 200; ++k) {
    const DisturbanceSample s = p.sample(0.1 * k, 0.1);
    CHECK(s.total.norm() <= c.d_max);
    CHECK((s.total - (s.wind + s.wave + s.current)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(p.clip_count() == 200);
}

TEST_CASE("gauss-markov stationary variance matches sigma^2 within 5%") {
  DisturbanceConfig c = quiet_config();
  c.wind.sigma = Vec3(700.0, 0.0, 0.0);
  c.wind.tau_c = 2.0;
  c.d_max = 1e7;
  DisturbanceProcess p = make_disturbance(c);

  const int n = 1000000;
  const double dt = 0.1;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = p.sample(dt * k, dt).wind(0);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(var == doctest::Approx(700.0 * 700.0).epsilon(0.05));

  // Zero-mean check with the autocorrelation-aware standard error: the
  // effective sample count of an exponentially correlated series is
  // N dt / (2 tau_c), not N.
  const double n_eff = n * dt / (2.0 * c.wind.tau_c);
  CHECK(std::abs(mean) < 3.0 * 700.0 / std::sqrt(n_eff));
}

TEST_CASE("out-of-order sampling faults") {
  DisturbanceProcess p = make_disturbance(stochastic_config());
  p.sample(0.0, 0.1);
  CHECK_THROWS_AS(p.sample(0.3, 0.1), std::logic_error);

  DisturbanceProcess q = make_disturbance(stochastic_config());
  q.sample(0.0, 0.1);
  q.sample(0.1, 0.1);
  CHECK_THROWS_AS(q.sample(0.2, 0.05), std::logic_error);
}

TEST_CASE("invalid configs are rejected with the offending field") {
  DisturbanceConfig c = stochastic_config();
  c.wave.sigma(1) = -1.0;
  CHECK_THROWS_WITH_AS(make_disturbance(c), doctest::Contains("wave.sigma"),
                       std::invalid_argument);

  c = stochastic_config();
  c.current.tau_c = 0.0;
  CHECK_THROWS_WITH_AS(make_disturbance(c), doctest::Contains("current.tau_c"),
                       std::invalid_argument);

  c = stochastic_config();
  c.d_max = 0.0;
  CHECK_THROWS_WITH_AS(make_disturbance(c), doctest::Contains("d_max"),
                       std::invalid_argument);
}

}  // TEST_SUITE
