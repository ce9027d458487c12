#pragma once

#include <cstdint>
#include <random>

#include "helm/core.hpp"

namespace helm {

/// One disturbance channel: a constant mean force plus an independent
/// first-order Gauss-Markov (exponentially correlated) process per
/// component with stationary standard deviation sigma.
struct ChannelConfig {
  Vec3 mean = Vec3::Zero();   // [N, N, N*m]
  Vec3 sigma = Vec3::Zero();  // stationary std dev, >= 0
  double tau_c = 1.0;         // correlation time [s], > 0
};

struct DisturbanceConfig {
  ChannelConfig wind;
  ChannelConfig wave;
  ChannelConfig current;
  double d_max = 1.0;         // hard bound on |total| [N]
  std::uint64_t seed = 0;
};

/// Matched disturbance sample with component attribution. total is always
/// the exact sum wind + wave + current; when the raw sum exceeds d_max all
/// three components are scaled radially (clipped = true).
struct DisturbanceSample {
  double t = 0.0;
  Vec3 total = Vec3::Zero();
  Vec3 wind = Vec3::Zero();
  Vec3 wave = Vec3::Zero();
  Vec3 current = Vec3::Zero();
  bool clipped = false;
};

/// Throws std::invalid_argument with a field-level message.
void validate_disturbance_config(const DisturbanceConfig& config);

/// Seeded stateful process. Single consumer: sample() must be called with
/// t = k*dt for k = 0, 1, 2, ... at a fixed dt; anything else faults.
/// Identical (config, seed, dt) reproduce identical sequences. The
/// Gauss-Markov states start from their stationary distribution and are
/// advanced with the exact discretization x' = a x + sigma sqrt(1-a^2) xi,
/// a = exp(-dt/tau_c).
class DisturbanceProcess {
 public:
  explicit DisturbanceProcess(const DisturbanceConfig& config);

  DisturbanceSample sample(double t, double dt);

  long clip_count() const { return clips_; }
  const DisturbanceConfig& config() const { return config_; }

 private:
  void advance(const ChannelConfig& channel, Vec3& state, double decay);

  DisturbanceConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Vec3 wind_state_;
  Vec3 wave_state_;
  Vec3 curr_state_;
  bool primed_ = false;
  double dt_ = 0.0;
  long step_ = 0;
  long clips_ = 0;
};

DisturbanceProcess make_disturbance(const DisturbanceConfig& config);

}  // namespace helm
