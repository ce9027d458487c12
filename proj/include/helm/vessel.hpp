#pragma once

#include "helm/core.hpp"

namespace helm {

/// Pose eta = [x m, y m, psi rad] (world frame, psi wrapped to (-pi, pi])
/// and body velocity nu = [u m/s, v m/s, r rad/s].
struct VesselState {
  Vec3 eta = Vec3::Zero();
  Vec3 nu = Vec3::Zero();
};

/// 3-DOF rigid-body + added-mass model parameters.
///
/// M must be symmetric positive definite. Damping is D(nu) = D_lin +
/// diag(D_quad_i * |nu_i|) with D_lin (+ its transpose) positive
/// semi-definite and D_quad >= 0, so nu' D(nu) nu >= 0 for all nu.
struct VesselParams {
  double mass = 0.0;            // rigid-body mass [kg]
  Mat3 M = Mat3::Zero();        // inertia incl. added mass
  Mat3 D_lin = Mat3::Zero();    // linear damping
  Vec3 D_quad = Vec3::Zero();   // quadratic damping coefficients
  Mat3 M_inv = Mat3::Zero();    // cached inverse of M
};

/// Validates and finalizes vessel parameters. Throws std::invalid_argument
/// if M is not symmetric positive definite, D_lin has a negative symmetric
/// part, or any D_quad entry is negative.
VesselParams make_vessel_params(double mass, const Mat3& M, const Mat3& D_lin,
                                const Vec3& D_quad);

/// World-from-body rotation R(psi).
Mat3 rotation(double psi);

/// Coriolis-centripetal matrix built from M in the standard 3-DOF
/// parameterization; skew-symmetric for any M, so nu'(C + C')nu = 0
/// holds structurally.
Mat3 coriolis(const VesselParams& params, const Vec3& nu);

/// Hydrodynamic damping D(nu) = D_lin + diag(D_quad_i * |nu_i|).
Mat3 damping(const VesselParams& params, const Vec3& nu);

struct StateDerivative {
  Vec3 eta_dot;
  Vec3 nu_dot;
};

/// Continuous-time derivative: eta_dot = R(psi) nu,
/// nu_dot = M^-1 (tau + d - C(nu) nu - D(nu) nu).
StateDerivative state_derivative(const VesselParams& params,
                                 const VesselState& state, const Wrench& tau,
                                 const Vec3& d);

/// One classical RK4 step with tau and d held constant (zero-order hold).
/// psi is re-wrapped to (-pi, pi] after the step. Throws std::runtime_error
/// if the result is non-finite, reporting the offending state.
VesselState integrate_step(const VesselParams& params, const VesselState& state,
                           const Wrench& tau, const Vec3& d, double dt);

}  // namespace helm
