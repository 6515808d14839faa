#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "odocal/kinematics.hpp"
#include "odocal/trajectory.hpp"

namespace odocal {

/// Non-systematic disturbances and sensor noise injected by the simulator.
/// A default-constructed config is disturbance-free.
struct DisturbanceConfig {
  double imu_yaw_sigma = 0.0;     // rad
  double imu_yaw_bias = 0.0;      // rad
  double vo_pos_sigma = 0.0;      // m
  double vo_yaw_sigma = 0.0;      // rad
  WheelVector slip_ratio{};       // longitudinal slip per wheel, [0, 1)
  double gravity_drift = 0.0;     // m/s^2 along world -x
  double twist_sigma_linear = 0.0;   // m/s, white per frame on true body vx, vy
  double twist_sigma_angular = 0.0;  // rad/s, white per frame on true body omega
  double vo_rate = 30.0;          // Hz
  std::uint64_t rng_seed = 1;

  /// Sensor noise used by the command-line defaults: IMU yaw 0.005 rad,
  /// VO 0.01 m / 0.01 rad at 30 Hz, no slip, drift, or process noise.
  static DisturbanceConfig typical();

  bool operator==(const DisturbanceConfig&) const = default;
};

void validate(const DisturbanceConfig& config);

struct TimedYaw {
  double t = 0.0;
  double yaw = 0.0;
  bool operator==(const TimedYaw&) const = default;
};

struct TimedPose {
  double t = 0.0;
  Pose2D pose;
};

struct RecordingMeta {
  TrajectorySpec spec;
  int repetition = 0;
  std::uint64_t seed = 0;
};

struct Recording {
  std::vector<WheelFrame> frames;
  std::vector<Pose2D> truth;  // aligned 1:1 with frames, heading wrapped
  std::vector<TimedYaw> imu_yaw;
  std::vector<TimedPose> vo_pose;
  RecordingMeta meta;
};

struct Dataset {
  KinematicParams true_params;
  KinematicParams command_params;
  DisturbanceConfig disturbance;
  std::uint64_t master_seed = 0;
  std::vector<Recording> recordings;

  std::vector<const Recording*> of_kind(TrajectoryKind kind) const;
};

/// Simulates one execution of `spec`. Wheel commands come from the reference
/// twists through inverse kinematics under `command_params` (the robot's own
/// belief, defaulting to `true_params`); the truth channel integrates the
/// wheels' physical motion under `true_params` with slip, gravity drift and
/// process noise applied. IMU yaw is logged at every frame, VO poses at
/// `vo_rate`. Deterministic in `disturbance.rng_seed`.
Recording simulate_recording(const KinematicParams& true_params, const TrajectorySpec& spec,
                             const DisturbanceConfig& disturbance,
                             const std::optional<KinematicParams>& command_params = std::nullopt);

struct DatasetOptions {
  std::vector<TrajectorySpec> specs;  // empty: the six default kinds
  int repetitions = 5;
  std::optional<KinematicParams> command_params;
};

/// Six kinds times five repetitions by default. Recording seeds derive from
/// `disturbance.rng_seed`, the kind index and the repetition index.
Dataset make_calibration_dataset(const KinematicParams& true_params,
                                 const DisturbanceConfig& disturbance,
                                 const DatasetOptions& options = {});

/// Seed for recording `index` of a dataset with the given master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace odocal
