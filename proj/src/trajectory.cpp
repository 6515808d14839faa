#include "odocal/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace odocal {

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::LineX: return "line_x";
    case TrajectoryKind::LineY: return "line_y";
    case TrajectoryKind::CircleCCW: return "circle_ccw";
    case TrajectoryKind::CircleCW: return "circle_cw";
    case TrajectoryKind::SpinCCW: return "spin_ccw";
    case TrajectoryKind::SpinCW: return "spin_cw";
  }
  return "unknown";
}

TrajectoryKind trajectory_kind_from_string(std::string_view name) {
  for (TrajectoryKind kind : kAllTrajectoryKinds) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown trajectory kind '" + std::string(name) + "'");
}

TrajectorySpec TrajectorySpec::defaults(TrajectoryKind kind) {
  TrajectorySpec spec;
  spec.kind = kind;
  switch (kind) {
    case TrajectoryKind::LineX:
    case TrajectoryKind::LineY:
      spec.length_or_angle = 1.0;
      spec.duration = 15.0;
      break;
    case TrajectoryKind::CircleCCW:
    case TrajectoryKind::CircleCW:
      spec.length_or_angle = 2.0 * std::numbers::pi;
      spec.duration = 45.0;
      break;
    case TrajectoryKind::SpinCCW:
    case TrajectoryKind::SpinCW:
      spec.length_or_angle = 2.0 * std::numbers::pi;
      spec.duration = 15.0;
      break;
  }
  return spec;
}

void validate(const TrajectorySpec& spec) {
  if (!(spec.duration > 0.0)) {
    throw std::invalid_argument("trajectory duration must be positive");
  }
  if (!(spec.sample_dt > 0.0)) {
    throw std::invalid_argument("trajectory sample_dt must be positive");
  }
  const bool circle =
      spec.kind == TrajectoryKind::CircleCCW || spec.kind == TrajectoryKind::CircleCW;
  if (circle && !(spec.radius > 0.0)) {
    throw std::invalid_argument("circle radius must be positive");
  }
  if (!std::isfinite(spec.length_or_angle)) {
    throw std::invalid_argument("trajectory displacement must be finite");
  }
}

QuinticSample quintic_profile(double total, double duration, double t) {
  if (!(duration > 0.0)) {
    throw std::domain_error("quintic duration must be positive");
  }
  if (t < 0.0 || t > duration) {
    throw std::domain_error("quintic time outside [0, duration]");
  }
  const double tau = t / duration;
  const double tau2 = tau * tau;
  const double tau3 = tau2 * tau;
  QuinticSample out;
  out.position = total * tau3 * (10.0 - 15.0 * tau + 6.0 * tau2);
  out.velocity = total * 30.0 * tau2 * (1.0 - 2.0 * tau + tau2) / duration;
  out.acceleration = total * 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * tau2) / (duration * duration);
  return out;
}

namespace {

// Signed circle travel: +1 counter-clockwise about a centre at (0, +r) for CCW,
// (0, -r) for CW, starting at the origin heading along +x.
double direction_sign(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::CircleCW:
    case TrajectoryKind::SpinCW:
      return -1.0;
    default:
      return 1.0;
  }
}

}  // namespace

Pose2D reference_pose(const TrajectorySpec& spec, double t) {
  validate(spec);
  const double magnitude = std::abs(spec.length_or_angle);
  const QuinticSample s = quintic_profile(magnitude, spec.duration, t);
  const double sign = direction_sign(spec.kind);
  switch (spec.kind) {
    case TrajectoryKind::LineX:
      return {s.position * (spec.length_or_angle < 0 ? -1.0 : 1.0), 0.0, 0.0};
    case TrajectoryKind::LineY:
      return {0.0, s.position * (spec.length_or_angle < 0 ? -1.0 : 1.0), 0.0};
    case TrajectoryKind::CircleCCW:
    case TrajectoryKind::CircleCW: {
      const double phi = s.position;
      return {spec.radius * std::sin(phi), sign * spec.radius * (1.0 - std::cos(phi)), 0.0};
    }
    case TrajectoryKind::SpinCCW:
    case TrajectoryKind::SpinCW:
      return {0.0, 0.0, sign * s.position};
  }
  return {};
}

std::vector<TimedTwist> reference_twists(const TrajectorySpec& spec) {
  validate(spec);
  const auto steps = static_cast<long>(std::llround(spec.duration / spec.sample_dt));
  const double magnitude = std::abs(spec.length_or_angle);
  const double line_sign = spec.length_or_angle < 0 ? -1.0 : 1.0;
  const double sign = direction_sign(spec.kind);

  std::vector<TimedTwist> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k <= steps; ++k) {
    const double t = k == steps ? spec.duration : static_cast<double>(k) * spec.sample_dt;
    const QuinticSample s = quintic_profile(magnitude, spec.duration, t);
    BodyTwist twist;
    switch (spec.kind) {
      case TrajectoryKind::LineX:
        twist.vx = line_sign * s.velocity;
        break;
      case TrajectoryKind::LineY:
        twist.vy = line_sign * s.velocity;
        break;
      case TrajectoryKind::CircleCCW:
      case TrajectoryKind::CircleCW: {
        // Heading stays fixed; the velocity vector follows the tangent.
        const double phi = s.position;
        const double speed = spec.radius * s.velocity;
        twist.vx = speed * std::cos(phi);
        twist.vy = sign * speed * std::sin(phi);
        break;
      }
      case TrajectoryKind::SpinCCW:
      case TrajectoryKind::SpinCW:
        twist.omega = sign * s.velocity;
        break;
    }
    out.push_back({t, twist});
  }
  return out;
}

}  // namespace odocal
