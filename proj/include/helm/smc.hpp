#pragma once

#include "helm/core.hpp"
#include "helm/vessel.hpp"

namespace helm {

/// Sliding-mode gains. Lambda and Ks are the diagonals of positive
/// diagonal matrices; phi is the boundary-layer thickness.
struct SmcGains {
  Vec3 Lambda = Vec3::Zero();  // [1/s]
  Vec3 Ks = Vec3::Zero();      // sliding-variable decay rates
  double phi = 0.0;            // boundary layer, sliding-variable units
};

/// Desired pose, pose rate, body velocity and body acceleration.
struct ReferenceSignal {
  Vec3 eta_d = Vec3::Zero();
  Vec3 etadot_d = Vec3::Zero();
  Vec3 nu_d = Vec3::Zero();
  Vec3 nudot_d = Vec3::Zero();

  /// Goal regulation: hold eta_d with zero desired rates.
  static ReferenceSignal goal(const Vec3& eta_d) {
    ReferenceSignal r;
    r.eta_d = eta_d;
    return r;
  }
};

/// Throws std::invalid_argument unless all gain diagonals are > 0 and
/// phi > 0.
void validate_gains(const SmcGains& gains);

/// e_p = eta - eta_d with the psi component wrapped to (-pi, pi].
Vec3 pose_error(const Vec3& eta, const Vec3& eta_d);

/// s = (nu - nu_d) + Lambda e_p. Pose error stays in pose coordinates,
/// velocity error in body coordinates.
Vec3 sliding_surface(const SmcGains& gains, const VesselState& state,
                     const ReferenceSignal& ref);

/// Elementwise boundary-layer saturation: x_i/phi inside |x_i| <= phi,
/// sign(x_i) outside.
Vec3 sat(const Vec3& x, double phi);

/// Implementable SMC wrench:
///   tau = C nu + D nu + M(-Ks sat(s/phi) + nudot_d - Lambda R nu
///                         + Lambda etadot_d).
/// The disturbance is unknown to the controller and does not appear.
Wrench smc_wrench(const VesselParams& params, const SmcGains& gains,
                  const VesselState& state, const ReferenceSignal& ref);

}  // namespace helm
