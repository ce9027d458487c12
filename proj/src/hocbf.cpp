#include "helm/hocbf.hpp"

#include <algorithm>

namespace helm {

double alpha_value(const BarrierParams& bparams, double h, double hdot) {
  if (!bparams.adaptive) return bparams.alpha;
  const double approach = std::max(0.0, -hdot);
  const double scale =
      std::min(1.0 + bparams.kappa * approach / (std::max(h, 0.0) + bparams.eps_h),
               bparams.max_scale);
  return bparams.alpha * scale;
}

double h_value(const Obstacle& obstacle, const Vec3& eta) {
  const double dx = eta(0) - obstacle.center(0);
  const double dy = eta(1) - obstacle.center(1);
  return dx * dx + dy * dy - obstacle.radius * obstacle.radius;
}

double h_dot(const Obstacle& obstacle, const VesselState& state) {
  const Mat3 r = rotation(state.eta(2));
  const Vec3 eta_dot = r * state.nu;
  const double dx = state.eta(0) - obstacle.center(0);
  const double dy = state.eta(1) - obstacle.center(1);
  return 2.0 * dx * eta_dot(0) + 2.0 * dy * eta_dot(1);
}

HalfSpaceConstraint build_constraint(const VesselParams& params,
                                     const BarrierParams& bparams,
                                     const Obstacle& obstacle,
                                     const VesselState& state) {
  const double psi = state.eta(2);
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  const double yaw_rate = state.nu(2);

  Eigen::Matrix<double, 2, 3> r2;
  r2 << c, -s, 0.0,
        s,  c, 0.0;
  Eigen::Matrix<double, 2, 3> r2_dot;
  r2_dot << -s, -c, 0.0,
             c, -s, 0.0;
  r2_dot *= yaw_rate;

  const Vec2 rel(state.eta(0) - obstacle.center(0),
                 state.eta(1) - obstacle.center(1));
  const Vec2 p_dot = r2 * state.nu;

  const double h = h_value(obstacle, state.eta);
  const double hdot = 2.0 * rel.dot(p_dot);
  const double alpha = alpha_value(bparams, h, hdot);

  // nudot = M^-1 tau - M^-1 (C + D) nu; only the first term carries tau.
  const Vec3 drift_acc =
      -params.M_inv * ((coriolis(params, state.nu) + damping(params, state.nu)) *
                       state.nu);

  HalfSpaceConstraint row;
  row.a = 2.0 * rel.transpose() * r2 * params.M_inv;
  const double rest = 2.0 * p_dot.squaredNorm() +
                      2.0 * rel.dot(r2_dot * state.nu) +
                      2.0 * rel.dot(r2 * drift_acc) + 2.0 * alpha * hdot +
                      alpha * alpha * h;
  row.b = -rest;
  return row;
}

std::vector<HalfSpaceConstraint> build_all(const VesselParams& params,
                                           const BarrierParams& bparams,
                                           std::span<const Obstacle> obstacles,
                                           const VesselState& state) {
  std::vector<HalfSpaceConstraint> rows;
  rows.reserve(obstacles.size());
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    HalfSpaceConstraint row = build_constraint(params, bparams, obstacles[i], state);
    row.obstacle_id = static_cast<int>(i);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace helm
