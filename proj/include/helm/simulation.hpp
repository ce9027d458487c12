#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "helm/scenario.hpp"

namespace helm {

struct ObstacleLogEntry {
  double h = 0.0;         // [m^2]
  double hdot = 0.0;      // [m^2/s]
  double alpha = 0.0;     // [1/s]
  double residual = 0.0;  // a tau_applied - b
};

/// One log row per control step. Row k holds the state at t = k dt and the
/// decision computed there (applied over [t, t+dt); the final row's
/// decision is computed but not applied).
struct LogRow {
  double t = 0.0;
  VesselState state;
  Vec3 e_p = Vec3::Zero();
  Vec3 s = Vec3::Zero();
  Wrench tau_smc = Wrench::Zero();
  Wrench tau_safe = Wrench::Zero();
  Wrench delta_u = Wrench::Zero();
  DisturbanceSample d;
  bool modified = false;
  int sweeps = 0;
  double max_residual = 0.0;
  bool feasible = true;
  std::array<double, 3> thr_mag{};  // [N]
  std::array<double, 3> thr_az{};   // [rad]
  bool thr_saturated = false;
  std::vector<ObstacleLogEntry> obstacles;
};

/// Fixed-schema trajectory log; the column set depends only on the number
/// of obstacles in the scenario. CSV serialization round-trips doubles
/// exactly (17 significant digits).
struct TrajectoryLog {
  std::size_t n_obstacles = 0;
  std::vector<LogRow> rows;

  std::vector<std::string> header() const;
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  static TrajectoryLog read_csv(std::istream& in);
};

/// Per-step controller cost (wall time around filter_pipeline only),
/// serialized separately from the trajectory so trajectory CSVs stay
/// byte-identical across reruns.
void write_timing_csv(std::ostream& out, const std::vector<double>& step_times);
std::vector<double> read_timing_csv(std::istream& in);

struct RunMetrics {
  double min_h = 0.0;              // NaN when the scenario has no obstacles
  double ss_ep_max = 0.0;          // max |e_p| over t >= 0.8 T
  double ss_ep_mean = 0.0;         // mean |e_p| over t >= 0.8 T
  double max_s_post = 0.0;         // max |s| over t >= 0.5 T
  double max_delta_u = 0.0;        // max |tau_safe - tau_smc|
  double mean_step_s = 0.0;
  double p99_step_s = 0.0;
  double modification_rate = 0.0;  // fraction of steps with modified=true
  long infeasible_count = 0;
  long clip_count = 0;             // disturbance radial clips
  long saturation_count = 0;       // thruster saturation steps
  double goal_reach_time = -1.0;   // first t of a sustained 10 s goal hold
};

/// Goal-reach criterion: position error < 1 m and |e_psi| < 0.05 rad
/// sustained for 10 s.
inline constexpr double kGoalPosTol = 1.0;
inline constexpr double kGoalPsiTol = 0.05;
inline constexpr double kGoalHoldTime = 10.0;

/// Metrics are a pure function of the log and the timing series, so a
/// saved run can be replayed to identical values.
RunMetrics compute_metrics(const TrajectoryLog& log,
                           const std::vector<double>& step_times);

nlohmann::json metrics_to_json(const RunMetrics& metrics);

struct RunResult {
  TrajectoryLog log;
  std::vector<double> step_times;
  RunMetrics metrics;
};

/// Closed loop: sample disturbance -> filter_pipeline -> allocate ->
/// integrate with the realized wrench and the true disturbance.
/// Deterministic for a given config. Throws on an unsafe initial state
/// (unless overridden) and on non-finite states.
RunResult run_scenario(const ScenarioConfig& config,
                       SafetyFilterKind kind = SafetyFilterKind::kProjection);

}  // namespace helm
