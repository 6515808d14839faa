#include "odocal/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace odocal {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle + std::numbers::pi, two_pi);
  if (wrapped < 0.0) {
    wrapped += two_pi;
  }
  wrapped -= std::numbers::pi;
  // fmod can round up to exactly +pi for inputs just below an odd multiple.
  if (wrapped >= std::numbers::pi) {
    wrapped -= two_pi;
  }
  return wrapped;
}

KinematicParams KinematicParams::nominal() {
  constexpr double half = 0.1125;
  constexpr double radius = 0.0254;
  KinematicParams p;
  p.wheel_x = {half, -half, -half, half};
  p.wheel_y = {half, half, -half, -half};
  p.wheel_radius = {radius, radius, radius, radius};
  return p;
}

namespace {

Eigen::Matrix3d normal_matrix(const KinematicParams& params) {
  double sum_x = 0.0;
  double sum_y = 0.0;
  double sum_r2 = 0.0;
  for (int i = 0; i < kWheels; ++i) {
    sum_x += params.wheel_x[i];
    sum_y += params.wheel_y[i];
    sum_r2 += params.wheel_x[i] * params.wheel_x[i] + params.wheel_y[i] * params.wheel_y[i];
  }
  Eigen::Matrix3d m;
  m << 4.0, 0.0, -sum_y,
       0.0, 4.0, sum_x,
       -sum_y, sum_x, sum_r2;
  return m;
}

}  // namespace

void validate(const KinematicParams& params) {
  for (int i = 0; i < kWheels; ++i) {
    const double x = params.wheel_x[i];
    const double y = params.wheel_y[i];
    const double r = params.wheel_radius[i];
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(r)) {
      throw std::invalid_argument("kinematic parameter of wheel " + std::to_string(i + 1) +
                                  " is not finite");
    }
    if (!(r > 0.0)) {
      throw std::invalid_argument("wheel " + std::to_string(i + 1) +
                                  " radius must be positive");
    }
    if (x * x + y * y == 0.0) {
      throw std::invalid_argument("wheel " + std::to_string(i + 1) +
                                  " is mounted at the body origin");
    }
  }
  const Eigen::Matrix3d m = normal_matrix(params);
  // det = 4 (4 sum r^2 - sum_x^2 - sum_y^2) vanishes only when all wheels coincide.
  if (m.determinant() <= 1e-9 * 16.0 * m(2, 2)) {
    throw std::invalid_argument("wheel layout is degenerate: constraint matrix is rank deficient");
  }
}

TwistSolver::TwistSolver(const KinematicParams& params) : params_(params) {
  validate(params_);
  normal_inverse_ = normal_matrix(params_).inverse();
}

BodyTwist TwistSolver::solve(const WheelVector& speeds, const WheelVector& cos_steer,
                             const WheelVector& sin_steer) const {
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (int i = 0; i < kWheels; ++i) {
    const double vx_i = speeds[i] * cos_steer[i];
    const double vy_i = speeds[i] * sin_steer[i];
    rhs[0] += vx_i;
    rhs[1] += vy_i;
    rhs[2] += params_.wheel_x[i] * vy_i - params_.wheel_y[i] * vx_i;
  }
  const Eigen::Vector3d twist = normal_inverse_ * rhs;
  return {twist[0], twist[1], twist[2]};
}

BodyTwist TwistSolver::solve_from_rates(const WheelVector& wheel_rates,
                                        const WheelVector& cos_steer,
                                        const WheelVector& sin_steer) const {
  WheelVector speeds;
  for (int i = 0; i < kWheels; ++i) {
    speeds[i] = wheel_rates[i] * params_.wheel_radius[i];
  }
  return solve(speeds, cos_steer, sin_steer);
}

BodyTwist body_twist_from_wheels(const KinematicParams& params, const WheelVector& speeds,
                                 const WheelVector& steers) {
  WheelVector c;
  WheelVector s;
  for (int i = 0; i < kWheels; ++i) {
    c[i] = std::cos(steers[i]);
    s[i] = std::sin(steers[i]);
  }
  return TwistSolver(params).solve(speeds, c, s);
}

BodyTwist body_twist_closed_form(const KinematicParams& params, const WheelVector& speeds,
                                 const WheelVector& steers) {
  validate(params);
  BodyTwist twist;
  for (int i = 0; i < kWheels; ++i) {
    const double c = std::cos(steers[i]);
    const double s = std::sin(steers[i]);
    const double x = params.wheel_x[i];
    const double y = params.wheel_y[i];
    const double k = (-y * c + x * s) / (4.0 * x * x + 4.0 * y * y);
    twist.vx += c * speeds[i] / 4.0;
    twist.vy += s * speeds[i] / 4.0;
    twist.omega += k * speeds[i];
  }
  return twist;
}

WheelCommand wheels_from_body_twist(const KinematicParams& params, const BodyTwist& twist,
                                    const std::optional<WheelVector>& previous_steer) {
  WheelCommand cmd;
  for (int i = 0; i < kWheels; ++i) {
    const double vx_i = twist.vx - params.wheel_y[i] * twist.omega;
    const double vy_i = twist.vy + params.wheel_x[i] * twist.omega;
    cmd.speed[i] = std::hypot(vx_i, vy_i);
    if (vx_i == 0.0 && vy_i == 0.0) {
      cmd.steer[i] = previous_steer ? (*previous_steer)[i] : 0.0;
    } else {
      cmd.steer[i] = wrap_angle(std::atan2(vy_i, vx_i));
    }
  }
  return cmd;
}

Eigen::Vector3d rotate_twist(const BodyTwist& twist, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * twist.vx - s * twist.vy, s * twist.vx + c * twist.vy, twist.omega};
}

Eigen::Vector3d pose_derivative(const KinematicParams& params, const Pose2D& pose,
                                const WheelFrame& frame) {
  WheelVector speeds;
  for (int i = 0; i < kWheels; ++i) {
    speeds[i] = frame.wheel_rate[i] * params.wheel_radius[i];
  }
  return rotate_twist(body_twist_from_wheels(params, speeds, frame.steer), pose.theta);
}

}  // namespace odocal
