#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "odocal/calibration.hpp"
#include "odocal/estimators.hpp"
#include "odocal/sensor_sim.hpp"

namespace odocal {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "ODOCAL_OUT_DIR";

struct SimulateConfig {
  KinematicParams true_params = KinematicParams::nominal();
  std::vector<TrajectorySpec> trajectories;  // empty: six defaults
  int repetitions = 5;
  bool wall_mode = false;
  double wall_gravity_drift = 0.001;  // m/s^2, used when wall_mode is on
};

struct RunConfig {
  /// Robot parameters used as the calibration start and for estimation.
  KinematicParams params = KinematicParams::nominal();
  SimulateConfig simulate;
  DisturbanceConfig disturbance = DisturbanceConfig::typical();
  CalibrationMethod method = CalibrationMethod::LM;
  double bound_fraction = 0.05;
  CalibrationOptions calibration;
  FilterKind filter = FilterKind::EKF;
  FilterNoise filter_noise;
  std::filesystem::path output_dir = "odocal_out";

  /// Disturbance actually injected by `simulate` (wall mode switches on the
  /// gravity drift).
  DisturbanceConfig effective_disturbance() const;
};

/// Parses a config document. Every section is optional; unknown keys anywhere
/// are rejected with FormatError. Parameter entries accept "nominal", an
/// inline {"wheel_x", "wheel_y", "wheel_radius"} object, or a path to such a
/// JSON file (relative to `base_dir`).
RunConfig parse_run_config(const nlohmann::json& j,
                           const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies a --seed override: simulator seed and stochastic optimizer seeds.
void apply_seed(RunConfig& config, std::uint64_t seed);

/// Resolves the output directory: flag, then environment, then config.
std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const std::optional<std::string>& flag);

/// Loads "nominal" or a params JSON file.
KinematicParams load_params(const std::string& source);

}  // namespace odocal
