#include "helm/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>

namespace helm {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: '" + context + "' must be an object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("config: unknown key '" + context + "." +
                                  item.key() + "'");
    }
  }
}

double read_number(const json& j, const std::string& context) {
  if (!j.is_number()) {
    throw std::invalid_argument("config: '" + context + "' must be a number");
  }
  return j.get<double>();
}

Vec3 read_vec3(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("config: '" + context +
                                "' must be an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) v(i) = read_number(j[static_cast<std::size_t>(i)], context);
  return v;
}

Vec2 read_vec2(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("config: '" + context +
                                "' must be an array of 2 numbers");
  }
  return Vec2(read_number(j[0], context), read_number(j[1], context));
}

Mat3 read_mat3(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("config: '" + context +
                                "' must be a 3x3 array of numbers");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    m.row(r) = read_vec3(j[static_cast<std::size_t>(r)], context).transpose();
  }
  return m;
}

ChannelConfig parse_channel(const json& j, const std::string& context,
                            const ChannelConfig& defaults) {
  reject_unknown_keys(j, context, {"mean", "sigma", "tau_c"});
  ChannelConfig c = defaults;
  if (j.contains("mean")) c.mean = read_vec3(j["mean"], context + ".mean");
  if (j.contains("sigma")) c.sigma = read_vec3(j["sigma"], context + ".sigma");
  if (j.contains("tau_c")) c.tau_c = read_number(j["tau_c"], context + ".tau_c");
  return c;
}

json vec3_to_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

json mat3_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec3_to_json(m.row(r).transpose()));
  return rows;
}

json channel_to_json(const ChannelConfig& c) {
  return json{{"mean", vec3_to_json(c.mean)},
              {"sigma", vec3_to_json(c.sigma)},
              {"tau_c", c.tau_c}};
}

}  // namespace

double triangle_yaw_inertia(const std::array<Vec2, 3>& vertices, double mass) {
  const Vec2& p1 = vertices[0];
  const Vec2& p2 = vertices[1];
  const Vec2& p3 = vertices[2];
  const double a2 = (p1 - p2).squaredNorm();
  const double b2 = (p2 - p3).squaredNorm();
  const double c2 = (p3 - p1).squaredNorm();
  const Vec2 centroid = (p1 + p2 + p3) / 3.0;
  // Polar inertia of a uniform lamina about its centroid plus the
  // parallel-axis shift to the body origin.
  return mass / 36.0 * (a2 + b2 + c2) + mass * centroid.squaredNorm();
}

ScenarioConfig ScenarioConfig::defaults() {
  ScenarioConfig cfg;
  cfg.layout.positions = {Vec2(50.0 / 3.0, 0.0), Vec2(-25.0 / 3.0, 10.0),
                          Vec2(-25.0 / 3.0, -10.0)};
  cfg.layout.f_max = 20e3;
  cfg.layout.c_f = 0.5;
  cfg.layout.c_n = 0.25;

  const double mass = 425e3;
  const double yaw_inertia = triangle_yaw_inertia(cfg.layout.positions, mass);
  // Added mass at 10% of the rigid-body diagonal; damping sized for an
  // open-loop surge decay time constant of ~50 s, quadratic term equal to
  // the linear one at unit speed over two.
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.1 * mass;
  m(1, 1) = 1.1 * mass;
  m(2, 2) = 1.1 * yaw_inertia;
  Mat3 d_lin = m / 50.0;
  const Vec3 d_quad = 0.5 * d_lin.diagonal();
  cfg.vessel = make_vessel_params(mass, m, d_lin, d_quad);

  cfg.gains.Lambda = Vec3(0.03, 0.03, 0.02);
  cfg.gains.Ks = Vec3(0.05, 0.05, 0.03);
  cfg.gains.phi = 0.05;

  cfg.barrier = BarrierParams{};
  cfg.filter = FilterConfig{};

  // Surge-dominant sea state; peak |d| lands near 10-15% of the 60 kN
  // thruster budget.
  cfg.disturbance.wind = {Vec3(2500.0, 400.0, 0.0), Vec3(500.0, 200.0, 1500.0), 60.0};
  cfg.disturbance.wave = {Vec3(1800.0, 300.0, 0.0), Vec3(700.0, 300.0, 2500.0), 8.0};
  cfg.disturbance.current = {Vec3(1200.0, 200.0, 0.0), Vec3(150.0, 80.0, 500.0), 120.0};
  cfg.disturbance.d_max = 10e3;
  cfg.disturbance.seed = cfg.seed;
  return cfg;
}

ScenarioConfig parse_scenario(const json& doc) {
  reject_unknown_keys(doc, "scenario",
                      {"seed", "dt", "horizon", "initial_state", "goal",
                       "allow_unsafe_start", "vessel", "smc", "barrier",
                       "filter", "thrusters", "disturbance", "obstacles",
                       "pose_noise"});

  ScenarioConfig cfg = ScenarioConfig::defaults();
  bool disturbance_seed_set = false;

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      throw std::invalid_argument("config: 'seed' must be an integer");
    }
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("dt")) cfg.dt = read_number(doc["dt"], "dt");
  if (doc.contains("horizon")) cfg.horizon = read_number(doc["horizon"], "horizon");
  if (doc.contains("goal")) cfg.goal = read_vec3(doc["goal"], "goal");
  if (doc.contains("allow_unsafe_start")) {
    if (!doc["allow_unsafe_start"].is_boolean()) {
      throw std::invalid_argument("config: 'allow_unsafe_start' must be a boolean");
    }
    cfg.allow_unsafe_start = doc["allow_unsafe_start"].get<bool>();
  }
  if (doc.contains("initial_state")) {
    const json& j = doc["initial_state"];
    reject_unknown_keys(j, "initial_state", {"eta", "nu"});
    if (j.contains("eta")) cfg.initial_state.eta = read_vec3(j["eta"], "initial_state.eta");
    if (j.contains("nu")) cfg.initial_state.nu = read_vec3(j["nu"], "initial_state.nu");
  }

  if (doc.contains("thrusters")) {
    const json& j = doc["thrusters"];
    reject_unknown_keys(j, "thrusters", {"positions", "f_max", "c_f", "c_n"});
    if (j.contains("positions")) {
      const json& p = j["positions"];
      if (!p.is_array() || p.size() != 3) {
        throw std::invalid_argument(
            "config: 'thrusters.positions' must list 3 [l_x, l_y] pairs");
      }
      for (std::size_t i = 0; i < 3; ++i) {
        cfg.layout.positions[i] = read_vec2(p[i], "thrusters.positions");
      }
    }
    if (j.contains("f_max")) cfg.layout.f_max = read_number(j["f_max"], "thrusters.f_max");
    if (j.contains("c_f")) cfg.layout.c_f = read_number(j["c_f"], "thrusters.c_f");
    if (j.contains("c_n")) cfg.layout.c_n = read_number(j["c_n"], "thrusters.c_n");
  }

  {
    // Vessel defaults depend on the (possibly overridden) thruster geometry.
    double mass = cfg.vessel.mass;
    const json vessel_doc = doc.contains("vessel") ? doc["vessel"] : json::object();
    reject_unknown_keys(vessel_doc, "vessel", {"mass", "M", "D_lin", "D_quad"});
    if (vessel_doc.contains("mass")) mass = read_number(vessel_doc["mass"], "vessel.mass");

    const double yaw_inertia = triangle_yaw_inertia(cfg.layout.positions, mass);
    Mat3 m = Mat3::Zero();
    m(0, 0) = 1.1 * mass;
    m(1, 1) = 1.1 * mass;
    m(2, 2) = 1.1 * yaw_inertia;
    if (vessel_doc.contains("M")) m = read_mat3(vessel_doc["M"], "vessel.M");
    Mat3 d_lin = m / 50.0;
    if (vessel_doc.contains("D_lin")) d_lin = read_mat3(vessel_doc["D_lin"], "vessel.D_lin");
    Vec3 d_quad = 0.5 * d_lin.diagonal();
    if (vessel_doc.contains("D_quad")) d_quad = read_vec3(vessel_doc["D_quad"], "vessel.D_quad");
    cfg.vessel = make_vessel_params(mass, m, d_lin, d_quad);
  }

  if (doc.contains("smc")) {
    const json& j = doc["smc"];
    reject_unknown_keys(j, "smc", {"Lambda", "Ks", "phi"});
    if (j.contains("Lambda")) cfg.gains.Lambda = read_vec3(j["Lambda"], "smc.Lambda");
    if (j.contains("Ks")) cfg.gains.Ks = read_vec3(j["Ks"], "smc.Ks");
    if (j.contains("phi")) cfg.gains.phi = read_number(j["phi"], "smc.phi");
  }

  if (doc.contains("barrier")) {
    const json& j = doc["barrier"];
    reject_unknown_keys(j, "barrier", {"alpha", "adaptive"});
    if (j.contains("alpha")) cfg.barrier.alpha = read_number(j["alpha"], "barrier.alpha");
    if (j.contains("adaptive")) {
      const json& a = j["adaptive"];
      reject_unknown_keys(a, "barrier.adaptive",
                          {"enabled", "kappa", "eps_h", "max_scale"});
      if (a.contains("enabled")) {
        if (!a["enabled"].is_boolean()) {
          throw std::invalid_argument(
              "config: 'barrier.adaptive.enabled' must be a boolean");
        }
        cfg.barrier.adaptive = a["enabled"].get<bool>();
      }
      if (a.contains("kappa")) cfg.barrier.kappa = read_number(a["kappa"], "barrier.adaptive.kappa");
      if (a.contains("eps_h")) cfg.barrier.eps_h = read_number(a["eps_h"], "barrier.adaptive.eps_h");
      if (a.contains("max_scale")) {
        cfg.barrier.max_scale = read_number(a["max_scale"], "barrier.adaptive.max_scale");
      }
    }
  }

  if (doc.contains("filter")) {
    const json& j = doc["filter"];
    reject_unknown_keys(j, "filter", {"gamma", "sweeps", "tol"});
    if (j.contains("gamma")) cfg.filter.gamma = read_number(j["gamma"], "filter.gamma");
    if (j.contains("sweeps")) {
      if (!j["sweeps"].is_number_integer() && !j["sweeps"].is_number_unsigned()) {
        throw std::invalid_argument("config: 'filter.sweeps' must be an integer");
      }
      cfg.filter.sweeps = j["sweeps"].get<int>();
    }
    if (j.contains("tol")) cfg.filter.tol = read_number(j["tol"], "filter.tol");
  }

  if (doc.contains("disturbance")) {
    const json& j = doc["disturbance"];
    reject_unknown_keys(j, "disturbance", {"wind", "wave", "current", "d_max", "seed"});
    if (j.contains("wind")) {
      cfg.disturbance.wind = parse_channel(j["wind"], "disturbance.wind", cfg.disturbance.wind);
    }
    if (j.contains("wave")) {
      cfg.disturbance.wave = parse_channel(j["wave"], "disturbance.wave", cfg.disturbance.wave);
    }
    if (j.contains("current")) {
      cfg.disturbance.current =
          parse_channel(j["current"], "disturbance.current", cfg.disturbance.current);
    }
    if (j.contains("d_max")) cfg.disturbance.d_max = read_number(j["d_max"], "disturbance.d_max");
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
        throw std::invalid_argument("config: 'disturbance.seed' must be an integer");
      }
      cfg.disturbance.seed = j["seed"].get<std::uint64_t>();
      disturbance_seed_set = true;
    }
  }
  if (!disturbance_seed_set) cfg.disturbance.seed = cfg.seed;

  if (doc.contains("obstacles")) {
    const json& j = doc["obstacles"];
    if (!j.is_array()) {
      throw std::invalid_argument("config: 'obstacles' must be an array");
    }
    cfg.obstacles.clear();
    for (const auto& item : j) {
      reject_unknown_keys(item, "obstacles[]", {"center", "radius"});
      Obstacle o;
      if (item.contains("center")) o.center = read_vec2(item["center"], "obstacles[].center");
      if (item.contains("radius")) o.radius = read_number(item["radius"], "obstacles[].radius");
      cfg.obstacles.push_back(o);
    }
  }

  if (doc.contains("pose_noise")) {
    const json& j = doc["pose_noise"];
    reject_unknown_keys(j, "pose_noise", {"enabled", "sigma_xy", "sigma_psi"});
    if (j.contains("enabled")) {
      if (!j["enabled"].is_boolean()) {
        throw std::invalid_argument("config: 'pose_noise.enabled' must be a boolean");
      }
      cfg.pose_noise.enabled = j["enabled"].get<bool>();
    }
    if (j.contains("sigma_xy")) cfg.pose_noise.sigma_xy = read_number(j["sigma_xy"], "pose_noise.sigma_xy");
    if (j.contains("sigma_psi")) cfg.pose_noise.sigma_psi = read_number(j["sigma_psi"], "pose_noise.sigma_psi");
  }

  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
  }
  return parse_scenario(doc);
}

void validate_scenario(const ScenarioConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) {
    throw std::invalid_argument("config: dt must be finite and > 0");
  }
  if (!(config.horizon >= config.dt) || !std::isfinite(config.horizon)) {
    throw std::invalid_argument("config: horizon must be >= dt");
  }
  if (!config.initial_state.eta.allFinite() || !config.initial_state.nu.allFinite()) {
    throw std::invalid_argument("config: initial_state must be finite");
  }
  if (!config.goal.allFinite()) {
    throw std::invalid_argument("config: goal must be finite");
  }
  validate_gains(config.gains);
  validate_filter_config(config.filter);
  validate_layout(config.layout);
  validate_disturbance_config(config.disturbance);
  if (!(config.barrier.alpha > 0.0) || !std::isfinite(config.barrier.alpha)) {
    throw std::invalid_argument("config: barrier.alpha must be finite and > 0");
  }
  if (config.barrier.adaptive &&
      (!(config.barrier.eps_h > 0.0) || !(config.barrier.max_scale >= 1.0) ||
       config.barrier.kappa < 0.0)) {
    throw std::invalid_argument(
        "config: barrier.adaptive needs eps_h > 0, kappa >= 0, max_scale >= 1");
  }
  if (config.pose_noise.enabled &&
      (config.pose_noise.sigma_xy < 0.0 || config.pose_noise.sigma_psi < 0.0)) {
    throw std::invalid_argument("config: pose_noise sigmas must be >= 0");
  }
  for (std::size_t i = 0; i < config.obstacles.size(); ++i) {
    const Obstacle& o = config.obstacles[i];
    if (!(o.radius > 0.0) || !std::isfinite(o.radius) || !o.center.allFinite()) {
      throw std::invalid_argument("config: obstacles[" + std::to_string(i) +
                                  "] needs finite center and radius > 0");
    }
    if (!config.allow_unsafe_start &&
        h_value(o, config.initial_state.eta) < 0.0) {
      throw std::invalid_argument(
          "config: initial state is inside the safety circle of obstacles[" +
          std::to_string(i) + "] (set allow_unsafe_start to override)");
    }
  }
}

nlohmann::json scenario_to_json(const ScenarioConfig& config) {
  json obstacles = json::array();
  for (const auto& o : config.obstacles) {
    obstacles.push_back(json{{"center", json::array({o.center(0), o.center(1)})},
                             {"radius", o.radius}});
  }
  json positions = json::array();
  for (const auto& p : config.layout.positions) {
    positions.push_back(json::array({p(0), p(1)}));
  }
  return json{
      {"seed", config.seed},
      {"dt", config.dt},
      {"horizon", config.horizon},
      {"initial_state",
       {{"eta", vec3_to_json(config.initial_state.eta)},
        {"nu", vec3_to_json(config.initial_state.nu)}}},
      {"goal", vec3_to_json(config.goal)},
      {"allow_unsafe_start", config.allow_unsafe_start},
      {"vessel",
       {{"mass", config.vessel.mass},
        {"M", mat3_to_json(config.vessel.M)},
        {"D_lin", mat3_to_json(config.vessel.D_lin)},
        {"D_quad", vec3_to_json(config.vessel.D_quad)}}},
      {"smc",
       {{"Lambda", vec3_to_json(config.gains.Lambda)},
        {"Ks", vec3_to_json(config.gains.Ks)},
        {"phi", config.gains.phi}}},
      {"barrier",
       {{"alpha", config.barrier.alpha},
        {"adaptive",
         {{"enabled", config.barrier.adaptive},
          {"kappa", config.barrier.kappa},
          {"eps_h", config.barrier.eps_h},
          {"max_scale", config.barrier.max_scale}}}}},
      {"filter",
       {{"gamma", config.filter.gamma},
        {"sweeps", config.filter.sweeps},
        {"tol", config.filter.tol}}},
      {"thrusters",
       {{"positions", positions},
        {"f_max", config.layout.f_max},
        {"c_f", config.layout.c_f},
        {"c_n", config.layout.c_n}}},
      {"disturbance",
       {{"wind", channel_to_json(config.disturbance.wind)},
        {"wave", channel_to_json(config.disturbance.wave)},
        {"current", channel_to_json(config.disturbance.current)},
        {"d_max", config.disturbance.d_max},
        {"seed", config.disturbance.seed}}},
      {"obstacles", obstacles},
      {"pose_noise",
       {{"enabled", config.pose_noise.enabled},
        {"sigma_xy", config.pose_noise.sigma_xy},
        {"sigma_psi", config.pose_noise.sigma_psi}}},
  };
}

}  // namespace helm
