#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "helm/allocation.hpp"
#include "helm/disturbance.hpp"
#include "helm/hocbf.hpp"
#include "helm/projection.hpp"
#include "helm/smc.hpp"
#include "helm/vessel.hpp"

namespace helm {

/// Optional additive measurement noise on the pose seen by the controller
/// (the plant always integrates the true state). Off by default.
struct PoseNoiseConfig {
  bool enabled = false;
  double sigma_xy = 0.0;   // [m]
  double sigma_psi = 0.0;  // [rad]
};

/// Full closed-loop scenario: plant, controller, safety filter, thrusters,
/// environment, geometry and run settings. JSON documents with unknown keys
/// are rejected; omitted keys fall back to the documented defaults.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  double dt = 0.1;        // [s]
  double horizon = 360.0; // [s]
  VesselState initial_state;
  Vec3 goal = Vec3(60.0, 0.0, 0.0);
  bool allow_unsafe_start = false;

  ThrusterLayout layout;
  VesselParams vessel;
  SmcGains gains;
  BarrierParams barrier;
  FilterConfig filter;
  DisturbanceConfig disturbance;
  std::vector<Obstacle> obstacles;
  PoseNoiseConfig pose_noise;

  /// Documented defaults: 425 t platform on an isosceles triangle
  /// (20 m base, 25 m height) with 20 kN azimuth thrusters.
  static ScenarioConfig defaults();
};

/// Uniform-lamina yaw inertia about the body origin for the triangle
/// spanned by the thruster positions.
double triangle_yaw_inertia(const std::array<Vec2, 3>& vertices, double mass);

/// Parses a scenario document, applying defaults for omitted keys and
/// rejecting unknown keys with the offending path in the message.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

ScenarioConfig load_scenario(const std::string& path);

/// Cross-field validation: positive dt/horizon, valid gains/filter/layout/
/// disturbance blocks, finite states, and a safe initial state (h >= 0 for
/// every obstacle) unless allow_unsafe_start is set.
void validate_scenario(const ScenarioConfig& config);

nlohmann::json scenario_to_json(const ScenarioConfig& config);

}  // namespace helm
