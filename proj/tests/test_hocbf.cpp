#include <doctest.h>

#include <cmath>
#include <random>

#include "helm/hocbf.hpp"

using namespace helm;

namespace {

VesselParams test_params() {
  Mat3 m = Mat3::Zero();
  m.diagonal() << 2.0, 3.0, 4.0;
  return make_vessel_params(1.0, m, 0.5 * Mat3::Identity(), Vec3(0.2, 0.2, 0.2));
}

// Test-local RK4 with constant tau; accepts negative dt for the centered
// stencils below (kept independent of the library integrator).
VesselState rk4_const_tau(const VesselParams& p, const VesselState& s0,
                          const Wrench& tau, double dt) {
  const auto advance = [](const VesselState& s, const StateDerivative& d,
                          double h) {
    VesselState out;
    out.eta = s.eta + h * d.eta_dot;
    out.nu = s.nu + h * d.nu_dot;
    return out;
  };
  const StateDerivative k1 = state_derivative(p, s0, tau, Vec3::Zero());
  const StateDerivative k2 =
      state_derivative(p, advance(s0, k1, 0.5 * dt), tau, Vec3::Zero());
  const StateDerivative k3 =
      state_derivative(p, advance(s0, k2, 0.5 * dt), tau, Vec3::Zero());
  const StateDerivative k4 = state_derivative(p, advance(s0, k3, dt), tau, Vec3::Zero());
  VesselState out;
  out.eta = s0.eta + dt / 6.0 *
                         (k1.eta_dot + 2.0 * k2.eta_dot + 2.0 * k3.eta_dot +
                          k4.eta_dot);
  out.nu = s0.nu + dt / 6.0 *
                       (k1.nu_dot + 2.0 * k2.nu_dot + 2.0 * k3.nu_dot + k4.nu_dot);
  return out;
}

// Numerical hddot under constant tau via a centered stencil of hdot.
double hddot_numeric(const VesselParams& p, const Obstacle& o,
                     const VesselState& s, const Wrench& tau, double dt) {
  const VesselState fwd = rk4_const_tau(p, s, tau, dt);
  const VesselState bwd = rk4_const_tau(p, s, tau, -dt);
  return (h_dot(o, fwd) - h_dot(o, bwd)) / (2.0 * dt);
}

}  // namespace

TEST_SUITE("hocbf") {

TEST_CASE("h on, inside and at a pythagorean point of the circle") {
  Obstacle o;
  o.center = Vec2(10.0, -5.0);
  o.radius = 5.0;
  CHECK(h_value(o, Vec3(15.0, -5.0, 0.3)) == doctest::Approx(0.0));
  CHECK(h_value(o, Vec3(10.0, -5.0, 0.0)) == doctest::Approx(-25.0));
  CHECK(h_value(o, Vec3(13.0, -1.0, 1.0)) == doctest::Approx(0.0));  // 3-4-5
}

TEST_CASE("hdot is zero at rest and 2*rho moving radially outward") {
  Obstacle o;
  o.center = Vec2(0.0, 0.0);
  o.radius = 2.0;
  VesselState s;
  s.eta = Vec3(7.0, 0.0, 0.0);
  CHECK(h_dot(o, s) == 0.0);

  // Unit surge at zero heading on the +x axis is radially outward.
  s.nu = Vec3(1.0, 0.0, 0.0);
  CHECK(h_dot(o, s) == doctest::Approx(2.0 * 7.0));

  // Same speed with the heading rotated: outward direction now needs sway.
  s.eta(2) = kPi / 2.0;
  s.nu = Vec3(0.0, -1.0, 0.0);
  CHECK(h_dot(o, s) == doctest::Approx(2.0 * 7.0));
}

TEST_CASE("hdot matches a finite difference along a trajectory") {
  const VesselParams p = test_params();
  Obstacle o;
  o.center = Vec2(4.0, 2.0);
  o.radius = 1.5;
  VesselState s;
  s.eta = Vec3(-1.0, 0.5, 0.4);
  s.nu = Vec3(0.8, -0.2, 0.15);
  const Wrench tau(1.5, -0.5, 0.3);

  const double dt = 1e-4;
  const VesselState fwd = rk4_const_tau(p, s, tau, dt);
  const VesselState bwd = rk4_const_tau(p, s, tau, -dt);
  const double fd = (h_value(o, fwd.eta) - h_value(o, bwd.eta)) / (2.0 * dt);
  const double analytic = h_dot(o, s);
  CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
}

TEST_CASE("hdot does not depend on tau (relative degree two)") {
  Obstacle o;
  o.center = Vec2(3.0, 3.0);
  o.radius = 1.0;
  VesselState s;
  s.eta = Vec3(0.0, 1.0, 0.7);
  s.nu = Vec3(0.5, 0.1, -0.2);
  const double base = h_dot(o, s);
  // hdot is a function of the state alone; tau only enters hddot.
  CHECK(h_dot(o, s) == base);

  const VesselParams p = test_params();
  const BarrierParams bp;
  const HalfSpaceConstraint row = build_constraint(p, bp, o, s);
  CHECK(row.a.norm() > 0.0);
}

TEST_CASE("constraint row matches the finite-difference hddot jacobian") {
  const VesselParams p = test_params();
  BarrierParams bp;
  bp.alpha = 0.3;

  std::mt19937_64 rng(321);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Obstacle o;
    o.center = Vec2(3.0 * gauss(rng), 3.0 * gauss(rng));
    o.radius = 1.0 + std::abs(gauss(rng));
    VesselState s;
    s.eta = Vec3(5.0 * gauss(rng), 5.0 * gauss(rng), 0.5 * gauss(rng));
    s.nu = Vec3(gauss(rng), gauss(rng), 0.3 * gauss(rng));
    if ((s.eta.head<2>() - o.center).norm() < 0.5) s.eta(0) += 2.0;

    const HalfSpaceConstraint row = build_constraint(p, bp, o, s);
    const Wrench tau0(gauss(rng), gauss(rng), gauss(rng));
    const double dt = 1e-4;
    RowVec3 fd;
    for (int i = 0; i < 3; ++i) {
      Wrench dtau = Wrench::Zero();
      dtau(i) = 1.0;
      const double plus = hddot_numeric(p, o, s, tau0 + dtau, dt);
      const double minus = hddot_numeric(p, o, s, tau0 - dtau, dt);
      fd(i) = (plus - minus) / 2.0;
    }
    CHECK((fd - row.a).norm() <= 1e-6 * row.a.norm());
  }
}

TEST_CASE("at rest far from the obstacle tau = 0 is admissible") {
  const VesselParams p = test_params();
  BarrierParams bp;
  bp.alpha = 0.2;
  Obstacle o;
  o.center = Vec2(50.0, 0.0);
  o.radius = 3.0;
  VesselState s;
  s.eta = Vec3(0.0, 0.0, 0.1);

  const HalfSpaceConstraint row = build_constraint(p, bp, o, s);
  const double h = h_value(o, s.eta);
  CHECK(row.b == doctest::Approx(-bp.alpha * bp.alpha * h));
  CHECK(row.b < 0.0);
  CHECK(row.a.dot(Wrench::Zero()) >= row.b);
}

TEST_CASE("degenerate center emits a zero row, not a dropped constraint") {
  const VesselParams p = test_params();
  const BarrierParams bp;
  Obstacle o;
  o.center = Vec2(1.0, -2.0);
  o.radius = 2.0;
  VesselState s;
  s.eta = Vec3(1.0, -2.0, 0.3);
  const HalfSpaceConstraint row = build_constraint(p, bp, o, s);
  CHECK(row.a.norm() == 0.0);
  CHECK(std::isfinite(row.b));
}

TEST_CASE("build_all stacks rows in obstacle order") {
  const VesselParams p = test_params();
  const BarrierParams bp;
  VesselState s;
  s.eta = Vec3(0.0, 0.0, 0.2);
  s.nu = Vec3(0.4, 0.0, 0.0);

  CHECK(build_all(p, bp, {}, s).empty());

  std::vector<Obstacle> two(2);
  two[0].center = Vec2(9.0, 1.0);
  two[0].radius = 2.0;
  two[1] = two[0];
  const auto rows2 = build_all(p, bp, two, s);
  REQUIRE(rows2.size() == 2);
  CHECK((rows2[0].a - rows2[1].a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rows2[0].b == rows2[1].b);
  CHECK(rows2[0].obstacle_id == 0);
  CHECK(rows2[1].obstacle_id == 1);

  std::vector<Obstacle> three(3);
  three[0] = {Vec2(10.0, 0.0), 2.0};
  three[1] = {Vec2(-5.0, 5.0), 1.0};
  three[2] = {Vec2(0.0, 12.0), 4.0};
  const auto rows3 = build_all(p, bp, three, s);
  REQUIRE(rows3.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const auto single =
        build_constraint(p, bp, three[static_cast<std::size_t>(i)], s);
    CHECK((rows3[static_cast<std::size_t>(i)].a - single.a).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(rows3[static_cast<std::size_t>(i)].b == single.b);
    CHECK(rows3[static_cast<std::size_t>(i)].obstacle_id == i);
  }
}

TEST_CASE("adaptive alpha grows on approach and stays bounded") {
  BarrierParams bp;
  bp.alpha = 0.1;
  bp.adaptive = true;
  bp.kappa = 2.0;
  bp.eps_h = 1.0;
  bp.max_scale = 5.0;

  CHECK(alpha_value(bp, 100.0, 5.0) == doctest::Approx(0.1));  // receding
  const double closing = alpha_value(bp, 4.0, -10.0);
  CHECK(closing > 0.1);
  CHECK(closing <= 0.1 * bp.max_scale);
  // Unsafe h < 0 must not flip the sign or blow up.
  const double inside = alpha_value(bp, -3.0, -50.0);
  CHECK(inside > 0.0);
  CHECK(inside <= 0.1 * bp.max_scale);

  BarrierParams constant;
  constant.alpha = 0.07;
  CHECK(alpha_value(constant, 1.0, -100.0) == doctest::Approx(0.07));
}

}  // TEST_SUITE
