#include "helm/smc.hpp"

#include <stdexcept>

namespace helm {

void validate_gains(const SmcGains& gains) {
  if (!gains.Lambda.allFinite() || gains.Lambda.minCoeff() <= 0.0) {
    throw std::invalid_argument("smc.Lambda diagonal must be > 0");
  }
  if (!gains.Ks.allFinite() || gains.Ks.minCoeff() <= 0.0) {
    throw std::invalid_argument("smc.Ks diagonal must be > 0");
  }
  if (!(gains.phi > 0.0) || !std::isfinite(gains.phi)) {
    throw std::invalid_argument("smc.phi must be finite and > 0");
  }
}

Vec3 pose_error(const Vec3& eta, const Vec3& eta_d) {
  Vec3 e = eta - eta_d;
  e(2) = wrap_angle(e(2));
  return e;
}

Vec3 sliding_surface(const SmcGains& gains, const VesselState& state,
                     const ReferenceSignal& ref) {
  const Vec3 e_p = pose_error(state.eta, ref.eta_d);
  const Vec3 e_v = state.nu - ref.nu_d;
  return e_v + gains.Lambda.cwiseProduct(e_p);
}

Vec3 sat(const Vec3& x, double phi) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const double z = x(i) / phi;
    out(i) = z > 1.0 ? 1.0 : (z < -1.0 ? -1.0 : z);
  }
  return out;
}

Wrench smc_wrench(const VesselParams& params, const SmcGains& gains,
                  const VesselState& state, const ReferenceSignal& ref) {
  const Vec3 s = sliding_surface(gains, state, ref);
  const Mat3 r = rotation(state.eta(2));
  const Vec3 inner = -gains.Ks.cwiseProduct(sat(s, gains.phi)) + ref.nudot_d -
                     gains.Lambda.cwiseProduct(r * state.nu) +
                     gains.Lambda.cwiseProduct(ref.etadot_d);
  return coriolis(params, state.nu) * state.nu +
         damping(params, state.nu) * state.nu + params.M * inner;
}

}  // namespace helm
