#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "odocal/kinematics.hpp"

namespace odocal {

enum class TrajectoryKind { LineX, LineY, CircleCCW, CircleCW, SpinCCW, SpinCW };

inline constexpr std::array<TrajectoryKind, 6> kAllTrajectoryKinds = {
    TrajectoryKind::LineX,    TrajectoryKind::LineY,  TrajectoryKind::CircleCCW,
    TrajectoryKind::CircleCW, TrajectoryKind::SpinCCW, TrajectoryKind::SpinCW};

std::string_view to_string(TrajectoryKind kind);
/// Throws std::invalid_argument on an unknown name.
TrajectoryKind trajectory_kind_from_string(std::string_view name);

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::LineX;
  // Metres for lines, radians for spins, radians of arc for circles. The
  // direction of a circle or spin comes from `kind`; the magnitude is used.
  double length_or_angle = 1.0;
  double radius = 0.5;
  double duration = 15.0;
  double sample_dt = 0.01;

  /// Defaults per kind: 1 m lines over 15 s, one full 0.5 m circle over 45 s,
  /// one full spin over 15 s. Peak wheel speed stays below 0.15 m/s.
  static TrajectorySpec defaults(TrajectoryKind kind);
};

void validate(const TrajectorySpec& spec);

struct QuinticSample {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

/// Rest-to-rest quintic s(t) = total (10 tau^3 - 15 tau^4 + 6 tau^5).
/// Throws std::domain_error when t lies outside [0, duration].
QuinticSample quintic_profile(double total, double duration, double t);

struct TimedTwist {
  double t = 0.0;
  BodyTwist twist;
};

/// Reference body twists sampled at k * sample_dt for k = 0..N with
/// N = round(duration / sample_dt); the final sample lands on `duration`.
std::vector<TimedTwist> reference_twists(const TrajectorySpec& spec);

/// Analytic reference pose at time t, starting from the origin with zero
/// heading.
Pose2D reference_pose(const TrajectorySpec& spec, double t);

}  // namespace odocal
