#pragma once

#include <array>

#include "helm/core.hpp"
#include "helm/projection.hpp"

namespace helm {

/// Three azimuth thrusters at fixed body-frame lever arms, each delivering
/// a planar force of magnitude up to f_max in any direction.
struct ThrusterLayout {
  std::array<Vec2, 3> positions;  // [l_x m, l_y m]
  double f_max = 0.0;             // [N] per thruster
  double c_f = 0.5;               // force-axis box safety factor, (0, 1]
  double c_n = 0.25;              // moment-axis box safety factor, (0, 1]
};

/// Stacked-force wrench map: columns act on [F_x1, F_y1, ..., F_x3, F_y3].
using AllocationMatrix = Eigen::Matrix<double, 3, 6>;

/// Per-thruster planar forces.
struct ThrusterCommand {
  std::array<Vec2, 3> force;  // [N]

  double magnitude(int i) const { return force[static_cast<std::size_t>(i)].norm(); }
  double azimuth(int i) const {
    const Vec2& f = force[static_cast<std::size_t>(i)];
    return std::atan2(f(1), f(0));
  }
};

struct AllocationResult {
  ThrusterCommand command;
  Wrench tau_realized = Wrench::Zero();
  bool saturated = false;
};

/// Throws std::invalid_argument for rank-deficient geometry or f_max <= 0.
void validate_layout(const ThrusterLayout& layout);

/// Maps stacked thruster forces to the net body wrench. Rank-deficient
/// layouts are rejected.
AllocationMatrix allocation_matrix(const ThrusterLayout& layout);

/// Minimum-norm (pseudo-inverse) force distribution followed by per-thruster
/// radial saturation to f_max; tau_realized is recomputed from the saturated
/// forces and equals tau_cmd when nothing saturates.
AllocationResult allocate(const ThrusterLayout& layout, const Wrench& tau_cmd);

/// Conservative axis-aligned inner box of the attainable wrench set:
/// |tau_x|, |tau_y| <= c_f * 3 f_max and |tau_n| <= c_n * sum(|l_i|) f_max.
ActuatorBox wrench_box(const ThrusterLayout& layout);

}  // namespace helm
