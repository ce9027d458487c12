#include "helm/allocation.hpp"

#include <stdexcept>

namespace helm {

void validate_layout(const ThrusterLayout& layout) {
  if (!(layout.f_max > 0.0) || !std::isfinite(layout.f_max)) {
    throw std::invalid_argument("thrusters.f_max must be finite and > 0");
  }
  for (const auto& p : layout.positions) {
    if (!p.allFinite()) {
      throw std::invalid_argument("thruster positions must be finite");
    }
  }
  if (!(layout.c_f > 0.0) || layout.c_f > 1.0 || !(layout.c_n > 0.0) ||
      layout.c_n > 1.0) {
    throw std::invalid_argument("thrusters.c_f and c_n must be in (0, 1]");
  }
  const AllocationMatrix b = allocation_matrix(layout);
  Eigen::SelfAdjointEigenSolver<Mat3> es(b * b.transpose());
  const Vec3 ev = es.eigenvalues();  // squared singular values of b
  if (ev(0) < 1e-18 * ev(2)) {
    throw std::invalid_argument(
        "thruster layout is rank deficient: wrench map does not span 3 DOF");
  }
}

AllocationMatrix allocation_matrix(const ThrusterLayout& layout) {
  AllocationMatrix b = AllocationMatrix::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec2& l = layout.positions[static_cast<std::size_t>(i)];
    b(0, 2 * i) = 1.0;
    b(1, 2 * i + 1) = 1.0;
    b(2, 2 * i) = -l(1);
    b(2, 2 * i + 1) = l(0);
  }
  return b;
}

AllocationResult allocate(const ThrusterLayout& layout, const Wrench& tau_cmd) {
  const AllocationMatrix b = allocation_matrix(layout);
  const Mat3 gram = b * b.transpose();
  const Eigen::Matrix<double, 6, 1> f =
      b.transpose() * gram.llt().solve(tau_cmd);

  AllocationResult out;
  for (int i = 0; i < 3; ++i) {
    Vec2 fi(f(2 * i), f(2 * i + 1));
    const double mag = fi.norm();
    if (mag > layout.f_max) {
      fi *= layout.f_max / mag;
      out.saturated = true;
    }
    out.command.force[static_cast<std::size_t>(i)] = fi;
  }

  Eigen::Matrix<double, 6, 1> f_sat;
  for (int i = 0; i < 3; ++i) {
    f_sat(2 * i) = out.command.force[static_cast<std::size_t>(i)](0);
    f_sat(2 * i + 1) = out.command.force[static_cast<std::size_t>(i)](1);
  }
  out.tau_realized = b * f_sat;
  return out;
}

ActuatorBox wrench_box(const ThrusterLayout& layout) {
  double lever_sum = 0.0;
  for (const auto& p : layout.positions) lever_sum += p.norm();
  const double f_bound = layout.c_f * 3.0 * layout.f_max;
  const double n_bound = layout.c_n * lever_sum * layout.f_max;
  ActuatorBox box;
  box.tau_max = Wrench(f_bound, f_bound, n_bound);
  box.tau_min = -box.tau_max;
  return box;
}

}  // namespace helm
