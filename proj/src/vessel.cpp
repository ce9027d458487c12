#include "helm/vessel.hpp"

#include <sstream>
#include <stdexcept>

namespace helm {

VesselParams make_vessel_params(double mass, const Mat3& M, const Mat3& D_lin,
                                const Vec3& D_quad) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("vessel.mass must be finite and > 0");
  }
  if (!M.allFinite() || !D_lin.allFinite() || !D_quad.allFinite()) {
    throw std::invalid_argument("vessel matrices must be finite");
  }
  const double m_scale = M.cwiseAbs().maxCoeff();
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * m_scale) {
    throw std::invalid_argument("vessel.M must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(M);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("vessel.M must be positive definite");
  }
  const Mat3 d_sym = 0.5 * (D_lin + D_lin.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> ed(d_sym);
  const double d_scale = std::max(1.0, D_lin.cwiseAbs().maxCoeff());
  if (ed.eigenvalues().minCoeff() < -1e-9 * d_scale) {
    throw std::invalid_argument("vessel.D_lin must be positive semi-definite");
  }
  if (D_quad.minCoeff() < 0.0) {
    throw std::invalid_argument("vessel.D_quad entries must be >= 0");
  }

  VesselParams p;
  p.mass = mass;
  p.M = M;
  p.D_lin = D_lin;
  p.D_quad = D_quad;
  p.M_inv = M.llt().solve(Mat3::Identity());
  return p;
}

Mat3 rotation(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat3 r;
  r << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Mat3 coriolis(const VesselParams& params, const Vec3& nu) {
  const Mat3& m = params.M;
  // c13/c23 from the rows of M; C is skew-symmetric by construction.
  const double c13 = -(m(1, 0) * nu(0) + m(1, 1) * nu(1) + m(1, 2) * nu(2));
  const double c23 = m(0, 0) * nu(0) + m(0, 1) * nu(1) + m(0, 2) * nu(2);
  Mat3 c;
  c << 0.0, 0.0, c13,
       0.0, 0.0, c23,
       -c13, -c23, 0.0;
  return c;
}

Mat3 damping(const VesselParams& params, const Vec3& nu) {
  Mat3 d = params.D_lin;
  d(0, 0) += params.D_quad(0) * std::abs(nu(0));
  d(1, 1) += params.D_quad(1) * std::abs(nu(1));
  d(2, 2) += params.D_quad(2) * std::abs(nu(2));
  return d;
}

StateDerivative state_derivative(const VesselParams& params,
                                 const VesselState& state, const Wrench& tau,
                                 const Vec3& d) {
  StateDerivative out;
  out.eta_dot = rotation(state.eta(2)) * state.nu;
  const Vec3 rhs = tau + d - coriolis(params, state.nu) * state.nu -
                   damping(params, state.nu) * state.nu;
  out.nu_dot = params.M_inv * rhs;
  return out;
}

namespace {

Eigen::Matrix<double, 6, 1> pack(const VesselState& s) {
  Eigen::Matrix<double, 6, 1> x;
  x << s.eta, s.nu;
  return x;
}

Eigen::Matrix<double, 6, 1> deriv6(const VesselParams& params,
                                   const Eigen::Matrix<double, 6, 1>& x,
                                   const Wrench& tau, const Vec3& d) {
  VesselState s;
  s.eta = x.head<3>();
  s.nu = x.tail<3>();
  const StateDerivative sd = state_derivative(params, s, tau, d);
  Eigen::Matrix<double, 6, 1> dx;
  dx << sd.eta_dot, sd.nu_dot;
  return dx;
}

}  // namespace

VesselState integrate_step(const VesselParams& params, const VesselState& state,
                           const Wrench& tau, const Vec3& d, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("integrate_step: dt must be > 0");
  }
  const Eigen::Matrix<double, 6, 1> x0 = pack(state);
  const auto k1 = deriv6(params, x0, tau, d);
  const auto k2 = deriv6(params, x0 + 0.5 * dt * k1, tau, d);
  const auto k3 = deriv6(params, x0 + 0.5 * dt * k2, tau, d);
  const auto k4 = deriv6(params, x0 + dt * k3, tau, d);
  const Eigen::Matrix<double, 6, 1> x1 =
      x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  VesselState out;
  out.eta = x1.head<3>();
  out.eta(2) = wrap_angle(out.eta(2));
  out.nu = x1.tail<3>();
  if (!out.eta.allFinite() || !out.nu.allFinite()) {
    std::ostringstream msg;
    msg << "integration fault: non-finite state after step; eta=["
        << out.eta.transpose() << "] nu=[" << out.nu.transpose()
        << "] from eta=[" << state.eta.transpose() << "] nu=["
        << state.nu.transpose() << "] tau=[" << tau.transpose() << "] d=["
        << d.transpose() << "] dt=" << dt;
    throw std::runtime_error(msg.str());
  }
  return out;
}

}  // namespace helm
