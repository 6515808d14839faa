#include "odocal/odometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace odocal {

Pose2D midpoint_step(const Pose2D& pose, const BodyTwist& twist, double dt) {
  const double theta_mid = pose.theta + 0.5 * twist.omega * dt;
  const double c = std::cos(theta_mid);
  const double s = std::sin(theta_mid);
  return {pose.x + dt * (c * twist.vx - s * twist.vy),
          pose.y + dt * (s * twist.vx + c * twist.vy),
          pose.theta + dt * twist.omega};
}

Eigen::Matrix3d midpoint_state_jacobian(const Pose2D& pose, const BodyTwist& twist, double dt) {
  const double theta_mid = pose.theta + 0.5 * twist.omega * dt;
  const double c = std::cos(theta_mid);
  const double s = std::sin(theta_mid);
  Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  a(0, 2) = dt * (-s * twist.vx - c * twist.vy);
  a(1, 2) = dt * (c * twist.vx - s * twist.vy);
  return a;
}

Eigen::Matrix3d midpoint_twist_jacobian(const Pose2D& pose, const BodyTwist& twist, double dt) {
  const double theta_mid = pose.theta + 0.5 * twist.omega * dt;
  const double c = std::cos(theta_mid);
  const double s = std::sin(theta_mid);
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  g(0, 0) = dt * c;
  g(0, 1) = -dt * s;
  g(1, 0) = dt * s;
  g(1, 1) = dt * c;
  // d theta_mid / d omega = dt / 2
  g(0, 2) = 0.5 * dt * dt * (-s * twist.vx - c * twist.vy);
  g(1, 2) = 0.5 * dt * dt * (c * twist.vx - s * twist.vy);
  g(2, 2) = dt;
  return g;
}

OdometryState step(const KinematicParams& params, const OdometryState& state,
                   const WheelFrame& frame, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("odometry step requires dt > 0");
  }
  WheelVector speeds;
  for (int i = 0; i < kWheels; ++i) {
    speeds[i] = frame.wheel_rate[i] * params.wheel_radius[i];
  }
  const BodyTwist twist = body_twist_from_wheels(params, speeds, frame.steer);
  OdometryState next = state;
  next.pose = midpoint_step(state.pose, twist, dt);
  for (int i = 0; i < kWheels; ++i) {
    next.wheel_angle[i] += frame.wheel_rate[i] * dt;
  }
  next.t = state.t + dt;
  return next;
}

namespace {

void check_monotone(std::span<const WheelFrame> frames) {
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (!(frames[k].t > frames[k - 1].t)) {
      throw std::invalid_argument("frame timestamps must strictly increase; violated at index " +
                                  std::to_string(k));
    }
  }
}

}  // namespace

PreparedFrames::PreparedFrames(std::span<const WheelFrame> frames) {
  check_monotone(frames);
  t_.reserve(frames.size());
  rate_.reserve(frames.size());
  cos_.reserve(frames.size());
  sin_.reserve(frames.size());
  for (const WheelFrame& f : frames) {
    t_.push_back(f.t);
    rate_.push_back(f.wheel_rate);
    WheelVector c;
    WheelVector s;
    for (int i = 0; i < kWheels; ++i) {
      c[i] = std::cos(f.steer[i]);
      s[i] = std::sin(f.steer[i]);
    }
    cos_.push_back(c);
    sin_.push_back(s);
  }
}

void PreparedFrames::integrate(const TwistSolver& solver, const Pose2D& initial,
                               std::vector<Pose2D>& out) const {
  out.resize(t_.size());
  if (t_.empty()) {
    return;
  }
  Pose2D pose = initial;
  out[0] = {pose.x, pose.y, wrap_angle(pose.theta)};
  for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
    const BodyTwist twist = solver.solve_from_rates(rate_[k], cos_[k], sin_[k]);
    pose = midpoint_step(pose, twist, t_[k + 1] - t_[k]);
    out[k + 1] = {pose.x, pose.y, wrap_angle(pose.theta)};
  }
}

std::vector<Pose2D> integrate_recording(const KinematicParams& params,
                                        std::span<const WheelFrame> frames,
                                        const Pose2D& initial) {
  if (frames.empty()) {
    return {};
  }
  const TwistSolver solver(params);
  const PreparedFrames prepared(frames);
  std::vector<Pose2D> out;
  prepared.integrate(solver, initial, out);
  return out;
}

}  // namespace odocal
