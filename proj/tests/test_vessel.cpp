#include <doctest.h>

#include <cmath>
#include <random>

#include "helm/vessel.hpp"

using namespace helm;

namespace {

Mat3 random_spd(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat3 a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = gauss(rng);
  return scale * (a.transpose() * a + 0.1 * Mat3::Identity());
}

VesselParams simple_params() {
  Mat3 m = Mat3::Zero();
  m.diagonal() << 2.0, 3.0, 4.0;
  Mat3 d_lin = 0.5 * Mat3::Identity();
  return make_vessel_params(1.0, m, d_lin, Vec3(1.0, 1.0, 1.0));
}

}  // namespace

TEST_SUITE("vessel") {

TEST_CASE("angle wrap lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == kPi);
  CHECK(wrap_angle(-kPi) == kPi);
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(6.2) == doctest::Approx(6.2 - 2.0 * kPi).epsilon(1e-12));
  CHECK(wrap_angle(0.0) == 0.0);
  for (double a : {-100.0, -5.5, -0.1, 0.3, 7.9, 1234.5}) {
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::abs(std::remainder(w - a, 2.0 * kPi)) < 1e-9);
  }
}

TEST_CASE("rotation at zero heading is the identity") {
  CHECK((rotation(0.0) - Mat3::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation quarter turn") {
  Mat3 expected;
  expected << 0.0, -1.0, 0.0,
              1.0, 0.0, 0.0,
              0.0, 0.0, 1.0;
  CHECK((rotation(kPi / 2.0) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rotation is orthogonal with unit determinant") {
  const Mat3 r = rotation(0.7);
  CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coriolis vanishes at rest") {
  const VesselParams p = simple_params();
  CHECK(coriolis(p, Vec3::Zero()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coriolis skew-symmetry sweep") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 m = random_spd(rng, 1.0 + 99.0 * (i % 7));
    const VesselParams p =
        make_vessel_params(1.0, m, Mat3::Identity(), Vec3::Zero());
    Vec3 nu;
    for (int k = 0; k < 3; ++k) nu(k) = 3.0 * gauss(rng);
    const Mat3 c = coriolis(p, nu);
    const double q = nu.dot((c + c.transpose()) * nu);
    CHECK(std::abs(q) < 1e-9 * (1.0 + nu.squaredNorm()));
  }
}

TEST_CASE("coriolis matches the standard 3-DOF expansion for diagonal M") {
  Mat3 m = Mat3::Zero();
  m.diagonal() << 5.0, 7.0, 11.0;
  const VesselParams p = make_vessel_params(1.0, m, Mat3::Identity(), Vec3::Zero());
  // nu = [u, 0, 0]: c13 = -(m22 v + m23 r) = 0, c23 = m11 u.
  const Mat3 c = coriolis(p, Vec3(1.0, 0.0, 0.0));
  Mat3 expected = Mat3::Zero();
  expected(1, 2) = 5.0;
  expected(2, 1) = -5.0;
  CHECK((c - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("damping reduces to D_lin at rest") {
  const VesselParams p = simple_params();
  CHECK((damping(p, Vec3::Zero()) - p.D_lin).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("damping direct substitution") {
  const VesselParams p =
      make_vessel_params(1.0, Mat3::Identity(), Mat3::Identity(), Vec3::Ones());
  const Mat3 d = damping(p, Vec3(2.0, 0.0, 0.0));
  Mat3 expected = Mat3::Identity();
  expected(0, 0) = 3.0;
  CHECK((d - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("damping dissipates for random velocities") {
  const VesselParams p = simple_params();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Vec3 nu;
    for (int k = 0; k < 3; ++k) nu(k) = gauss(rng);
    CHECK(nu.dot(damping(p, nu) * nu) >= 0.0);
  }
}

TEST_CASE("state derivative is zero at equilibrium") {
  const VesselParams p = simple_params();
  VesselState s;
  const StateDerivative d = state_derivative(p, s, Wrench::Zero(), Vec3::Zero());
  CHECK(d.eta_dot.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.nu_dot.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state derivative at rest is M^-1 tau") {
  const VesselParams p = simple_params();
  VesselState s;
  s.eta = Vec3(1.0, -2.0, 0.3);
  const StateDerivative d =
      state_derivative(p, s, Wrench(1000.0, 0.0, 0.0), Vec3::Zero());
  CHECK(d.eta_dot.cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.nu_dot(0) == doctest::Approx(1000.0 / 2.0).epsilon(1e-12));
  CHECK(d.nu_dot(1) == doctest::Approx(0.0));
  CHECK(d.nu_dot(2) == doctest::Approx(0.0));
}

TEST_CASE("unforced kinetic energy decays at the damping rate") {
  std::mt19937_64 rng(11);
  const Mat3 m = random_spd(rng, 4.0);
  const VesselParams p = make_vessel_params(1.0, m, Mat3::Identity(), Vec3::Ones());

  VesselState s;
  s.eta = Vec3(0.5, -0.2, 0.4);
  s.nu = Vec3(1.2, -0.8, 0.5);

  // Central difference around t+delta using the states at t and t+2*delta.
  const double delta = 5e-4;
  const VesselState mid = integrate_step(p, s, Wrench::Zero(), Vec3::Zero(), delta);
  const VesselState end = integrate_step(p, mid, Wrench::Zero(), Vec3::Zero(), delta);

  const auto kinetic = [&](const VesselState& st) {
    return 0.5 * st.nu.dot(p.M * st.nu);
  };
  const double fd = (kinetic(end) - kinetic(s)) / (2.0 * delta);
  const double expected = -mid.nu.dot(damping(p, mid.nu) * mid.nu);
  CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
  CHECK(expected <= 0.0);
}

TEST_CASE("integrate_step keeps the equilibrium fixed") {
  const VesselParams p = simple_params();
  VesselState s;
  s.eta = Vec3(3.0, 4.0, 1.0);
  const VesselState next = integrate_step(p, s, Wrench::Zero(), Vec3::Zero(), 0.1);
  CHECK((next.eta - s.eta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.nu.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("integrate_step converges at fourth order") {
  const VesselParams p = simple_params();
  const Wrench tau(5.0, 3.0, 1.0);

  const auto simulate = [&](double dt, int steps) {
    VesselState s;
    s.nu = Vec3(0.5, -0.3, 0.2);
    for (int i = 0; i < steps; ++i) {
      s = integrate_step(p, s, tau, Vec3::Zero(), dt);
    }
    Eigen::Matrix<double, 6, 1> x;
    x << s.eta, s.nu;
    return x;
  };

  const auto coarse = simulate(0.2, 10);
  const auto mid = simulate(0.1, 20);
  const auto fine = simulate(0.05, 40);
  const double e1 = (coarse - mid).norm();
  const double e2 = (mid - fine).norm();
  const double order = std::log2(e1 / e2);
  CHECK(order >= 3.5);
  CHECK(order <= 4.5);
}

TEST_CASE("integrate_step wraps psi across pi") {
  const VesselParams p = simple_params();
  VesselState s;
  s.eta = Vec3(0.0, 0.0, kPi - 1e-3);
  s.nu = Vec3(0.0, 0.0, 1.0);
  const VesselState next = integrate_step(p, s, Wrench::Zero(), Vec3::Zero(), 0.05);
  CHECK(next.eta(2) <= kPi);
  CHECK(next.eta(2) > -kPi);
  CHECK(next.eta(2) < 0.0);  // crossed the branch cut
}

TEST_CASE("integrate_step rejects bad inputs") {
  const VesselParams p = simple_params();
  VesselState s;
  CHECK_THROWS_AS(integrate_step(p, s, Wrench::Zero(), Vec3::Zero(), 0.0),
                  std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(
      integrate_step(p, s, Wrench(nan, 0.0, 0.0), Vec3::Zero(), 0.1),
      doctest::Contains("integration fault"), std::runtime_error);
}

TEST_CASE("vessel params validation") {
  Mat3 not_spd = Mat3::Identity();
  not_spd(2, 2) = -1.0;
  CHECK_THROWS_AS(make_vessel_params(1.0, not_spd, Mat3::Identity(), Vec3::Zero()),
                  std::invalid_argument);

  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(make_vessel_params(1.0, asym, Mat3::Identity(), Vec3::Zero()),
                  std::invalid_argument);

  CHECK_THROWS_AS(make_vessel_params(1.0, Mat3::Identity(), Mat3::Identity(),
                                     Vec3(-1.0, 0.0, 0.0)),
                  std::invalid_argument);

  Mat3 neg_damping = -Mat3::Identity();
  CHECK_THROWS_AS(make_vessel_params(1.0, Mat3::Identity(), neg_damping, Vec3::Zero()),
                  std::invalid_argument);

  CHECK_THROWS_AS(make_vessel_params(0.0, Mat3::Identity(), Mat3::Identity(),
                                     Vec3::Zero()),
                  std::invalid_argument);
}

}  // TEST_SUITE
