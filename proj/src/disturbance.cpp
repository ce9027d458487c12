#include "helm/disturbance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace helm {

namespace {

void validate_channel(const ChannelConfig& channel, const std::string& name) {
  if (!channel.mean.allFinite()) {
    throw std::invalid_argument("disturbance." + name + ".mean must be finite");
  }
  if (!channel.sigma.allFinite() || channel.sigma.minCoeff() < 0.0) {
    throw std::invalid_argument("disturbance." + name +
                                ".sigma entries must be >= 0");
  }
  if (!(channel.tau_c > 0.0) || !std::isfinite(channel.tau_c)) {
    throw std::invalid_argument("disturbance." + name +
                                ".tau_c must be finite and > 0");
  }
}

}  // namespace

void validate_disturbance_config(const DisturbanceConfig& config) {
  validate_channel(config.wind, "wind");
  validate_channel(config.wave, "wave");
  validate_channel(config.current, "current");
  if (!(config.d_max > 0.0) || !std::isfinite(config.d_max)) {
    throw std::invalid_argument("disturbance.d_max must be finite and > 0");
  }
}

DisturbanceProcess::DisturbanceProcess(const DisturbanceConfig& config)
    : config_(config), rng_(config.seed) {
  validate_disturbance_config(config);
  // Stationary start: x_0 ~ N(0, sigma^2) componentwise. Draw order is
  // fixed (wind, wave, current) for reproducibility.
  for (int i = 0; i < 3; ++i) wind_state_(i) = config_.wind.sigma(i) * normal_(rng_);
  for (int i = 0; i < 3; ++i) wave_state_(i) = config_.wave.sigma(i) * normal_(rng_);
  for (int i = 0; i < 3; ++i) curr_state_(i) = config_.current.sigma(i) * normal_(rng_);
}

void DisturbanceProcess::advance(const ChannelConfig& channel, Vec3& state,
                                 double decay) {
  const double diffuse = std::sqrt(1.0 - decay * decay);
  for (int i = 0; i < 3; ++i) {
    state(i) = decay * state(i) + channel.sigma(i) * diffuse * normal_(rng_);
  }
}

DisturbanceSample DisturbanceProcess::sample(double t, double dt) {
  if (!primed_) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("disturbance sample: dt must be > 0");
    }
    dt_ = dt;
    primed_ = true;
  }
  if (dt != dt_) {
    throw std::logic_error("disturbance sample: dt changed mid-sequence");
  }
  const double expected = static_cast<double>(step_) * dt_;
  if (std::abs(t - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
    throw std::logic_error("disturbance sample: out-of-order t (expected " +
                           std::to_string(expected) + ", got " +
                           std::to_string(t) + ")");
  }

  DisturbanceSample out;
  out.t = t;
  out.wind = config_.wind.mean + wind_state_;
  out.wave = config_.wave.mean + wave_state_;
  out.current = config_.current.mean + curr_state_;
  out.total = out.wind + out.wave + out.current;

  // Radial clip preserving direction statistics; components are scaled by
  // the same factor so total stays the exact sum. The recompute-and-rescale
  // loop absorbs last-ulp overshoot of the scaled sum.
  for (int pass = 0; pass < 4 && out.total.norm() > config_.d_max; ++pass) {
    const double scale = config_.d_max / out.total.norm() * (1.0 - 1e-15);
    out.wind *= scale;
    out.wave *= scale;
    out.current *= scale;
    out.total = out.wind + out.wave + out.current;
    out.clipped = true;
  }
  if (out.clipped) ++clips_;

  advance(config_.wind, wind_state_, std::exp(-dt_ / config_.wind.tau_c));
  advance(config_.wave, wave_state_, std::exp(-dt_ / config_.wave.tau_c));
  advance(config_.current, curr_state_, std::exp(-dt_ / config_.current.tau_c));
  ++step_;
  return out;
}

DisturbanceProcess make_disturbance(const DisturbanceConfig& config) {
  return DisturbanceProcess(config);
}

}  // namespace helm
