#pragma once

#include <span>
#include <vector>

#include "helm/core.hpp"
#include "helm/hocbf.hpp"
#include "helm/smc.hpp"
#include "helm/vessel.hpp"

namespace helm {

/// Componentwise wrench bounds induced by the thrusters.
struct ActuatorBox {
  Wrench tau_min = Wrench::Zero();
  Wrench tau_max = Wrench::Zero();
};

/// Sequential relaxed-projection settings.
struct FilterConfig {
  double gamma = 1.0;  // relaxation in (0, 1]
  int sweeps = 20;     // max sweeps over the rows
  double tol = 1e-6;   // residual tolerance, same units as b
};

struct FilterResult {
  Wrench tau_safe = Wrench::Zero();
  bool modified = false;   // true if the half-space sweeps moved the iterate
  int sweeps_used = 0;
  double max_residual = 0.0;
  bool feasible = true;
};

void validate_filter_config(const FilterConfig& config);

/// Componentwise median(tau_min, tau, tau_max).
Wrench clip_box(const ActuatorBox& box, const Wrench& tau);

/// Fast sequential relaxed projection onto the intersection of the CBF
/// half-spaces and the actuator box.
///
/// Starts from clip_box(tau_nominal), sweeps the rows in fixed order and,
/// for each violated row, applies tau += gamma (v_j / |a_j|^2) a_j followed
/// by re-clipping. Stops once a sweep ends with max violation <= tol.
/// Rows with |a_j| < 1e-9 are skipped for updates but still counted in
/// residuals. Returns the best iterate seen (smallest max violation), so
/// the result never violates more than the clipped start; feasible=false
/// signals that tol was not reached within the sweep budget.
///
/// `trace`, when non-null, records the iterate after every row update
/// (diagnostics/test hook).
FilterResult project(const ActuatorBox& box,
                     std::span<const HalfSpaceConstraint> constraints,
                     const FilterConfig& config, const Wrench& tau_nominal,
                     std::vector<Wrench>* trace = nullptr);

/// Largest violation max_j max(0, b_j - a_j tau) over the rows.
double max_violation(std::span<const HalfSpaceConstraint> constraints,
                     const Wrench& tau);

struct QpSolution {
  Wrench tau = Wrench::Zero();
  bool feasible = false;
};

/// Exact minimizer of |tau - tau_nominal|^2 over {A tau >= b} intersected
/// with the box, by enumeration of candidate active sets (at most three
/// active constraints in three variables). Test/benchmark oracle; never in
/// the control path. feasible=false reports an empty constraint set.
/// Returns the box-clipped nominal directly when it already satisfies all
/// rows (it is the exact minimizer then).
QpSolution qp_oracle(const ActuatorBox& box,
                     std::span<const HalfSpaceConstraint> constraints,
                     const Wrench& tau_nominal);

/// Same minimizer without the clipped-nominal shortcut: the full
/// enumeration runs on every call. This is the in-loop benchmark path, so
/// its cost reflects solving the QP at each sampling instant.
QpSolution qp_oracle_enumerated(const ActuatorBox& box,
                                std::span<const HalfSpaceConstraint> constraints,
                                const Wrench& tau_nominal);

enum class SafetyFilterKind { kProjection, kQpOracle };

/// Per-obstacle values logged alongside the filter decision.
struct ConstraintDiag {
  int obstacle_id = -1;
  double h = 0.0;
  double hdot = 0.0;
  double alpha = 0.0;
  HalfSpaceConstraint row;
};

struct StepDecision {
  Vec3 s = Vec3::Zero();
  Wrench tau_smc = Wrench::Zero();
  FilterResult filter;
  Wrench delta_u = Wrench::Zero();  // tau_safe - tau_smc
  std::vector<ConstraintDiag> constraints;
};

/// tau_SMC -> build_all -> project (or the QP oracle when `kind` selects
/// it) -> tau_safe, with diagnostics.
StepDecision filter_pipeline(const VesselParams& params, const SmcGains& gains,
                             const BarrierParams& bparams,
                             const ActuatorBox& box, const FilterConfig& fconfig,
                             std::span<const Obstacle> obstacles,
                             const VesselState& state, const ReferenceSignal& ref,
                             SafetyFilterKind kind = SafetyFilterKind::kProjection);

}  // namespace helm
