#include "helm/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace helm {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double idx = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

}  // namespace

std::vector<std::string> TrajectoryLog::header() const {
  std::vector<std::string> cols = {
      "t_s", "x_m", "y_m", "psi_rad", "u_mps", "v_mps", "r_radps",
      "ep_x_m", "ep_y_m", "ep_psi_rad",
      "s_u", "s_v", "s_r", "s_norm",
      "tau_smc_x_N", "tau_smc_y_N", "tau_smc_n_Nm",
      "tau_safe_x_N", "tau_safe_y_N", "tau_safe_n_Nm",
      "du_x_N", "du_y_N", "du_n_Nm", "du_norm_N",
      "d_x_N", "d_y_N", "d_n_Nm",
      "d_wind_x_N", "d_wind_y_N", "d_wind_n_Nm",
      "d_wave_x_N", "d_wave_y_N", "d_wave_n_Nm",
      "d_curr_x_N", "d_curr_y_N", "d_curr_n_Nm",
      "d_clipped",
      "modified", "sweeps", "max_residual", "feasible",
      "thr1_f_N", "thr1_az_rad", "thr2_f_N", "thr2_az_rad",
      "thr3_f_N", "thr3_az_rad", "thr_saturated"};
  for (std::size_t i = 0; i < n_obstacles; ++i) {
    const std::string tag = "obs" + std::to_string(i);
    cols.push_back(tag + "_h_m2");
    cols.push_back(tag + "_hdot_m2ps");
    cols.push_back(tag + "_alpha_1ps");
    cols.push_back(tag + "_residual");
  }
  return cols;
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  const auto cols = header();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
  }
  for (const LogRow& r : rows) {
    std::vector<double> v = {
        r.t, r.state.eta(0), r.state.eta(1), r.state.eta(2),
        r.state.nu(0), r.state.nu(1), r.state.nu(2),
        r.e_p(0), r.e_p(1), r.e_p(2),
        r.s(0), r.s(1), r.s(2), r.s.norm(),
        r.tau_smc(0), r.tau_smc(1), r.tau_smc(2),
        r.tau_safe(0), r.tau_safe(1), r.tau_safe(2),
        r.delta_u(0), r.delta_u(1), r.delta_u(2), r.delta_u.norm(),
        r.d.total(0), r.d.total(1), r.d.total(2),
        r.d.wind(0), r.d.wind(1), r.d.wind(2),
        r.d.wave(0), r.d.wave(1), r.d.wave(2),
        r.d.current(0), r.d.current(1), r.d.current(2),
        r.d.clipped ? 1.0 : 0.0,
        r.modified ? 1.0 : 0.0, static_cast<double>(r.sweeps),
        r.max_residual, r.feasible ? 1.0 : 0.0,
        r.thr_mag[0], r.thr_az[0], r.thr_mag[1], r.thr_az[1],
        r.thr_mag[2], r.thr_az[2], r.thr_saturated ? 1.0 : 0.0};
    for (const auto& o : r.obstacles) {
      v.push_back(o.h);
      v.push_back(o.hdot);
      v.push_back(o.alpha);
      v.push_back(o.residual);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      out << fmt(v[i]) << (i + 1 < v.size() ? "," : "\n");
    }
  }
}

std::string TrajectoryLog::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

TrajectoryLog TrajectoryLog::read_csv(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("trajectory csv: missing header");
  }
  std::size_t n_cols = line.empty() ? 0 : 1;
  for (char c : line) {
    if (c == ',') ++n_cols;
  }
  constexpr std::size_t kFixedCols = 48;
  if (n_cols < kFixedCols || (n_cols - kFixedCols) % 4 != 0) {
    throw std::runtime_error("trajectory csv: unexpected column count");
  }
  log.n_obstacles = (n_cols - kFixedCols) / 4;

  std::vector<double> v;
  v.reserve(n_cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    v.clear();
    const char* p = line.c_str();
    char* end = nullptr;
    for (std::size_t i = 0; i < n_cols; ++i) {
      v.push_back(std::strtod(p, &end));
      if (p == end) {
        throw std::runtime_error("trajectory csv: malformed row");
      }
      p = (*end == ',') ? end + 1 : end;
    }
    LogRow r;
    std::size_t k = 0;
    r.t = v[k++];
    for (int i = 0; i < 3; ++i) r.state.eta(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.state.nu(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.e_p(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.s(i) = v[k++];
    ++k;  // s_norm (derived)
    for (int i = 0; i < 3; ++i) r.tau_smc(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.tau_safe(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.delta_u(i) = v[k++];
    ++k;  // du_norm (derived)
    for (int i = 0; i < 3; ++i) r.d.total(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.d.wind(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.d.wave(i) = v[k++];
    for (int i = 0; i < 3; ++i) r.d.current(i) = v[k++];
    r.d.clipped = v[k++] != 0.0;
    r.d.t = r.t;
    r.modified = v[k++] != 0.0;
    r.sweeps = static_cast<int>(v[k++]);
    r.max_residual = v[k++];
    r.feasible = v[k++] != 0.0;
    for (int i = 0; i < 3; ++i) {
      r.thr_mag[static_cast<std::size_t>(i)] = v[k++];
      r.thr_az[static_cast<std::size_t>(i)] = v[k++];
    }
    r.thr_saturated = v[k++] != 0.0;
    r.obstacles.resize(log.n_obstacles);
    for (auto& o : r.obstacles) {
      o.h = v[k++];
      o.hdot = v[k++];
      o.alpha = v[k++];
      o.residual = v[k++];
    }
    log.rows.push_back(std::move(r));
  }
  return log;
}

void write_timing_csv(std::ostream& out, const std::vector<double>& step_times) {
  out << "step,filter_time_s\n";
  for (std::size_t i = 0; i < step_times.size(); ++i) {
    out << i << "," << fmt(step_times[i]) << "\n";
  }
}

std::vector<double> read_timing_csv(std::istream& in) {
  std::vector<double> times;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("timing csv: missing header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("timing csv: malformed row");
    }
    times.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return times;
}

RunMetrics compute_metrics(const TrajectoryLog& log,
                           const std::vector<double>& step_times) {
  if (log.rows.empty()) {
    throw std::invalid_argument("compute_metrics: empty log");
  }
  RunMetrics m;
  const double t_end = log.rows.back().t;
  const double ss_start = 0.8 * t_end;
  const double post_start = 0.5 * t_end;

  double min_h = std::numeric_limits<double>::infinity();
  double ss_sum = 0.0;
  long ss_n = 0;
  long modified_n = 0;

  for (const LogRow& r : log.rows) {
    for (const auto& o : r.obstacles) min_h = std::min(min_h, o.h);
    const double ep = r.e_p.norm();
    if (r.t >= ss_start) {
      m.ss_ep_max = std::max(m.ss_ep_max, ep);
      ss_sum += ep;
      ++ss_n;
    }
    if (r.t >= post_start) {
      m.max_s_post = std::max(m.max_s_post, r.s.norm());
    }
    m.max_delta_u = std::max(m.max_delta_u, r.delta_u.norm());
    if (r.modified) ++modified_n;
    if (!r.feasible) ++m.infeasible_count;
    if (r.d.clipped) ++m.clip_count;
    if (r.thr_saturated) ++m.saturation_count;
  }
  m.min_h = log.n_obstacles == 0 ? std::numeric_limits<double>::quiet_NaN() : min_h;
  m.ss_ep_mean = ss_n > 0 ? ss_sum / static_cast<double>(ss_n) : 0.0;
  m.modification_rate =
      static_cast<double>(modified_n) / static_cast<double>(log.rows.size());

  // Goal reach: earliest row from which the goal condition holds for a
  // full 10 s window.
  const double dt = log.rows.size() > 1 ? log.rows[1].t - log.rows[0].t : 0.0;
  const long hold_rows = dt > 0.0 ? std::lround(kGoalHoldTime / dt) : 0;
  long run_start = -1;
  long run_len = 0;
  m.goal_reach_time = -1.0;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const LogRow& r = log.rows[i];
    const bool at_goal = r.e_p.head<2>().norm() < kGoalPosTol &&
                         std::abs(r.e_p(2)) < kGoalPsiTol;
    if (at_goal) {
      if (run_start < 0) {
        run_start = static_cast<long>(i);
        run_len = 0;
      }
      ++run_len;
      if (run_len > hold_rows) {
        m.goal_reach_time = log.rows[static_cast<std::size_t>(run_start)].t;
        break;
      }
    } else {
      run_start = -1;
      run_len = 0;
    }
  }

  if (!step_times.empty()) {
    double sum = 0.0;
    for (double s : step_times) sum += s;
    m.mean_step_s = sum / static_cast<double>(step_times.size());
    m.p99_step_s = percentile(step_times, 0.99);
  }
  return m;
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
  nlohmann::json j{{"ss_ep_max", m.ss_ep_max},
                   {"ss_ep_mean", m.ss_ep_mean},
                   {"max_s_post", m.max_s_post},
                   {"max_delta_u", m.max_delta_u},
                   {"mean_step_s", m.mean_step_s},
                   {"p99_step_s", m.p99_step_s},
                   {"modification_rate", m.modification_rate},
                   {"infeasible_count", m.infeasible_count},
                   {"clip_count", m.clip_count},
                   {"saturation_count", m.saturation_count},
                   {"goal_reach_time", m.goal_reach_time}};
  if (std::isnan(m.min_h)) {
    j["min_h"] = nullptr;
  } else {
    j["min_h"] = m.min_h;
  }
  return j;
}

RunResult run_scenario(const ScenarioConfig& config, SafetyFilterKind kind) {
  validate_scenario(config);

  const ActuatorBox box = wrench_box(config.layout);
  DisturbanceProcess process = make_disturbance(config.disturbance);
  const ReferenceSignal ref = ReferenceSignal::goal(config.goal);

  std::mt19937_64 noise_rng(derive_seed(config.seed, 0x6e6f697365ull));
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  const long n_steps = std::lround(config.horizon / config.dt);
  RunResult out;
  out.log.n_obstacles = config.obstacles.size();
  out.log.rows.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.step_times.reserve(static_cast<std::size_t>(n_steps) + 1);

  VesselState state = config.initial_state;
  state.eta(2) = wrap_angle(state.eta(2));

  for (long k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    const DisturbanceSample d = process.sample(t, config.dt);

    VesselState measured = state;
    if (config.pose_noise.enabled) {
      measured.eta(0) += config.pose_noise.sigma_xy * unit_normal(noise_rng);
      measured.eta(1) += config.pose_noise.sigma_xy * unit_normal(noise_rng);
      measured.eta(2) = wrap_angle(measured.eta(2) + config.pose_noise.sigma_psi *
                                                         unit_normal(noise_rng));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const StepDecision decision =
        filter_pipeline(config.vessel, config.gains, config.barrier, box,
                        config.filter, config.obstacles, measured, ref, kind);
    const auto t1 = std::chrono::steady_clock::now();
    out.step_times.push_back(std::chrono::duration<double>(t1 - t0).count());

    const AllocationResult alloc = allocate(config.layout, decision.filter.tau_safe);

    LogRow row;
    row.t = t;
    row.state = state;
    row.e_p = pose_error(measured.eta, ref.eta_d);
    row.s = decision.s;
    row.tau_smc = decision.tau_smc;
    row.tau_safe = decision.filter.tau_safe;
    row.delta_u = decision.delta_u;
    row.d = d;
    row.modified = decision.filter.modified;
    row.sweeps = decision.filter.sweeps_used;
    row.max_residual = decision.filter.max_residual;
    row.feasible = decision.filter.feasible;
    for (int i = 0; i < 3; ++i) {
      row.thr_mag[static_cast<std::size_t>(i)] = alloc.command.magnitude(i);
      row.thr_az[static_cast<std::size_t>(i)] = alloc.command.azimuth(i);
    }
    row.thr_saturated = alloc.saturated;
    row.obstacles.reserve(decision.constraints.size());
    for (const auto& c : decision.constraints) {
      ObstacleLogEntry entry;
      entry.h = c.h;
      entry.hdot = c.hdot;
      entry.alpha = c.alpha;
      entry.residual = c.row.a.dot(alloc.tau_realized) - c.row.b;
      row.obstacles.push_back(entry);
    }
    out.log.rows.push_back(std::move(row));

    if (k < n_steps) {
      try {
        state = integrate_step(config.vessel, state, alloc.tau_realized, d.total,
                               config.dt);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("run_scenario aborted at t=" + std::to_string(t) +
                                 ": " + e.what());
      }
    }
  }

  out.metrics = compute_metrics(out.log, out.step_times);
  return out;
}

}  // namespace helm
