#include "helm/projection.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace helm {

namespace {
constexpr double kRowNormEps = 1e-9;  // degenerate-row threshold on |a|
}

void validate_filter_config(const FilterConfig& config) {
  if (!(config.gamma > 0.0) || config.gamma > 1.0) {
    throw std::invalid_argument("filter.gamma must be in (0, 1]");
  }
  if (config.sweeps < 1) {
    throw std::invalid_argument("filter.sweeps must be >= 1");
  }
  if (!(config.tol > 0.0)) {
    throw std::invalid_argument("filter.tol must be > 0");
  }
}

Wrench clip_box(const ActuatorBox& box, const Wrench& tau) {
  return tau.cwiseMax(box.tau_min).cwiseMin(box.tau_max);
}

double max_violation(std::span<const HalfSpaceConstraint> constraints,
                     const Wrench& tau) {
  double worst = 0.0;
  for (const auto& row : constraints) {
    worst = std::max(worst, row.b - row.a.dot(tau));
  }
  return worst;
}

FilterResult project(const ActuatorBox& box,
                     std::span<const HalfSpaceConstraint> constraints,
                     const FilterConfig& config, const Wrench& tau_nominal,
                     std::vector<Wrench>* trace) {
  const Wrench tau0 = clip_box(box, tau_nominal);

  FilterResult result;
  Wrench tau = tau0;
  Wrench best = tau0;
  double best_violation = max_violation(constraints, tau0);

  int sweeps_used = 0;
  for (int k = 0; k < config.sweeps; ++k) {
    sweeps_used = k + 1;
    for (const auto& row : constraints) {
      const double norm_sq = row.a.squaredNorm();
      if (norm_sq < kRowNormEps * kRowNormEps) continue;
      const double v = row.b - row.a.dot(tau);
      if (v > 0.0) {
        tau += config.gamma * (v / norm_sq) * row.a.transpose();
        tau = clip_box(box, tau);
        if (trace != nullptr) trace->push_back(tau);
      }
    }
    const double violation = max_violation(constraints, tau);
    if (violation < best_violation) {
      best = tau;
      best_violation = violation;
    }
    if (violation <= config.tol) break;
  }

  result.tau_safe = best;
  result.max_residual = best_violation;
  result.feasible = best_violation <= config.tol;
  result.sweeps_used = sweeps_used;
  result.modified = (best - tau0).cwiseAbs().maxCoeff() != 0.0;
  return result;
}

namespace {

struct NormalizedRow {
  Vec3 c;   // unit normal, constraint c' tau >= d
  double d;
};

// Stacks the half-space rows and the six box faces as c' tau >= d with
// unit-norm c. Degenerate rows (|a| ~ 0) are resolved immediately: a
// positive b makes the instance infeasible, otherwise the row is inert.
bool stack_constraints(const ActuatorBox& box,
                       std::span<const HalfSpaceConstraint> constraints,
                       std::vector<NormalizedRow>& out) {
  out.clear();
  out.reserve(constraints.size() + 6);
  for (const auto& row : constraints) {
    const double norm = row.a.norm();
    if (norm < kRowNormEps) {
      if (row.b > 0.0) return false;
      continue;
    }
    out.push_back({row.a.transpose() / norm, row.b / norm});
  }
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = 1.0;
    out.push_back({e, box.tau_min(i)});
    out.push_back({-e, -box.tau_max(i)});
  }
  return true;
}

bool primal_feasible(const std::vector<NormalizedRow>& rows, const Wrench& tau,
                     double tol) {
  for (const auto& r : rows) {
    if (r.c.dot(tau) < r.d - tol) return false;
  }
  return true;
}

}  // namespace

QpSolution qp_oracle(const ActuatorBox& box,
                     std::span<const HalfSpaceConstraint> constraints,
                     const Wrench& tau_nominal) {
  // If the box-clipped nominal already satisfies every row it is the exact
  // minimizer (it minimizes over the box alone).
  const Wrench clipped = clip_box(box, tau_nominal);
  if (max_violation(constraints, clipped) <= 0.0) {
    QpSolution sol;
    sol.tau = clipped;
    sol.feasible = true;
    return sol;
  }
  return qp_oracle_enumerated(box, constraints, tau_nominal);
}

QpSolution qp_oracle_enumerated(const ActuatorBox& box,
                                std::span<const HalfSpaceConstraint> constraints,
                                const Wrench& tau_nominal) {
  QpSolution sol;

  std::vector<NormalizedRow> rows;
  if (!stack_constraints(box, constraints, rows)) return sol;

  const int n = static_cast<int>(rows.size());
  const double scale =
      std::max({1.0, box.tau_max.cwiseAbs().maxCoeff(),
                box.tau_min.cwiseAbs().maxCoeff(), tau_nominal.cwiseAbs().maxCoeff()});
  const double feas_tol = 1e-9 * scale;

  double best_dist = std::numeric_limits<double>::infinity();
  bool found = false;
  Wrench best = Wrench::Zero();

  auto consider = [&](const Wrench& tau) {
    if (!primal_feasible(rows, tau, feas_tol)) return;
    const double dist = (tau - tau_nominal).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = tau;
      found = true;
    }
  };

  // Unconstrained candidate.
  consider(tau_nominal);

  // One active constraint: tau = tau0 + mu c, mu = d - c' tau0 >= 0.
  for (int i = 0; i < n; ++i) {
    const double mu = rows[i].d - rows[i].c.dot(tau_nominal);
    if (mu < 0.0) continue;
    consider(tau_nominal + mu * rows[i].c);
  }

  // Two active constraints.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::Matrix2d g;
      g(0, 0) = 1.0;
      g(0, 1) = rows[i].c.dot(rows[j].c);
      g(1, 0) = g(0, 1);
      g(1, 1) = 1.0;
      if (std::abs(g.determinant()) < 1e-12) continue;
      Eigen::Vector2d rhs(rows[i].d - rows[i].c.dot(tau_nominal),
                          rows[j].d - rows[j].c.dot(tau_nominal));
      const Eigen::Vector2d mu = g.inverse() * rhs;
      if (mu(0) < 0.0 || mu(1) < 0.0) continue;
      consider(tau_nominal + mu(0) * rows[i].c + mu(1) * rows[j].c);
    }
  }

  // Three active constraints.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Mat3 cmat;
        cmat.row(0) = rows[i].c.transpose();
        cmat.row(1) = rows[j].c.transpose();
        cmat.row(2) = rows[k].c.transpose();
        const Mat3 g = cmat * cmat.transpose();
        if (std::abs(g.determinant()) < 1e-12) continue;
        const Vec3 rhs(rows[i].d - rows[i].c.dot(tau_nominal),
                       rows[j].d - rows[j].c.dot(tau_nominal),
                       rows[k].d - rows[k].c.dot(tau_nominal));
        const Vec3 mu = g.inverse() * rhs;
        if (mu.minCoeff() < 0.0) continue;
        consider(tau_nominal + cmat.transpose() * mu);
      }
    }
  }

  sol.tau = found ? best : Wrench::Zero();
  sol.feasible = found;
  return sol;
}

StepDecision filter_pipeline(const VesselParams& params, const SmcGains& gains,
                             const BarrierParams& bparams,
                             const ActuatorBox& box, const FilterConfig& fconfig,
                             std::span<const Obstacle> obstacles,
                             const VesselState& state, const ReferenceSignal& ref,
                             SafetyFilterKind kind) {
  StepDecision out;
  out.s = sliding_surface(gains, state, ref);
  out.tau_smc = smc_wrench(params, gains, state, ref);

  const std::vector<HalfSpaceConstraint> rows =
      build_all(params, bparams, obstacles, state);
  out.constraints.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ConstraintDiag diag;
    diag.obstacle_id = rows[i].obstacle_id;
    diag.h = h_value(obstacles[i], state.eta);
    diag.hdot = h_dot(obstacles[i], state);
    diag.alpha = alpha_value(bparams, diag.h, diag.hdot);
    diag.row = rows[i];
    out.constraints.push_back(diag);
  }

  if (kind == SafetyFilterKind::kProjection) {
    out.filter = project(box, rows, fconfig, out.tau_smc);
  } else {
    const QpSolution qp = qp_oracle_enumerated(box, rows, out.tau_smc);
    if (qp.feasible) {
      out.filter.tau_safe = qp.tau;
      out.filter.max_residual = max_violation(rows, qp.tau);
      out.filter.feasible = true;
      out.filter.sweeps_used = 0;
      const Wrench tau0 = clip_box(box, out.tau_smc);
      // The enumerated solve reassembles the clip point through KKT
      // algebra, so compare with an ulp-level tolerance.
      out.filter.modified =
          (qp.tau - tau0).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + tau0.norm());
    } else {
      // Infeasible instance: fall back to the projection iterate so the
      // simulation can continue and surface the event.
      out.filter = project(box, rows, fconfig, out.tau_smc);
      out.filter.feasible = false;
    }
  }
  out.delta_u = out.filter.tau_safe - out.tau_smc;
  return out;
}

}  // namespace helm
