#pragma once

#include <span>
#include <vector>

#include "helm/core.hpp"
#include "helm/vessel.hpp"

namespace helm {

/// Circular obstacle with safety radius (vessel inflation included).
struct Obstacle {
  Vec2 center = Vec2::Zero();  // [m]
  double radius = 0.0;         // [m], must be > 0
};

/// Class-K gain for the second-order barrier condition
///   hddot + 2 alpha hdot + alpha^2 h >= 0.
/// The adaptive schedule alpha(h, hdot) = alpha * (1 + kappa * max(0, -hdot)
/// / (max(h, 0) + eps_h)), capped at alpha * max_scale, is an extension hook
/// and is off by default.
struct BarrierParams {
  double alpha = 0.06;  // [1/s]
  bool adaptive = false;
  double kappa = 2.0;
  double eps_h = 1.0;      // [m^2]
  double max_scale = 10.0;
};

/// One linear wrench constraint a tau >= b (row of A).
struct HalfSpaceConstraint {
  RowVec3 a = RowVec3::Zero();
  double b = 0.0;
  int obstacle_id = -1;
};

/// Effective class-K gain for the current (h, hdot).
double alpha_value(const BarrierParams& bparams, double h, double hdot);

/// h(eta) = (x - x_o)^2 + (y - y_o)^2 - R^2; h >= 0 outside/on the circle.
double h_value(const Obstacle& obstacle, const Vec3& eta);

/// hdot = 2 (x - x_o) xdot + 2 (y - y_o) ydot with [xdot, ydot] from
/// R(psi) nu. Has no direct tau dependence (relative degree two).
double h_dot(const Obstacle& obstacle, const VesselState& state);

/// Builds the half-space row for one obstacle by expanding
///   hddot = 2 |pdot|^2 + 2 (p - p_o)'(Rdot2 nu + R2 nudot)
/// with nudot = M^-1 (tau - C nu - D nu) at d = 0 and collecting the
/// tau-linear part into a, the remainder (including 2 alpha hdot +
/// alpha^2 h) into -b. A zero row (vessel at the obstacle center) is
/// emitted as-is; the filter's degeneracy policy handles it.
HalfSpaceConstraint build_constraint(const VesselParams& params,
                                     const BarrierParams& bparams,
                                     const Obstacle& obstacle,
                                     const VesselState& state);

/// One row per obstacle, ordered by obstacle index.
std::vector<HalfSpaceConstraint> build_all(const VesselParams& params,
                                           const BarrierParams& bparams,
                                           std::span<const Obstacle> obstacles,
                                           const VesselState& state);

}  // namespace helm
