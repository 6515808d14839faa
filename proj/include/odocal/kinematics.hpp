#pragma once

#include <array>
#include <numbers>
#include <optional>

#include <Eigen/Core>

namespace odocal {

inline constexpr int kWheels = 4;

using WheelVector = std::array<double, kWheels>;

/// Wraps an angle to [-pi, pi).
double wrap_angle(double angle);

/// Geometric parameters of a four-wheel independently steered, independently
/// driven base. Wheel order is 1: front-left (+x, +y), 2: rear-left (-x, +y),
/// 3: rear-right (-x, -y), 4: front-right (+x, -y). All values in SI units.
struct KinematicParams {
  WheelVector wheel_x{};
  WheelVector wheel_y{};
  WheelVector wheel_radius{};

  /// Nominal CAD geometry: |x| = |y| = 112.5 mm, r = 25.4 mm.
  static KinematicParams nominal();

  bool operator==(const KinematicParams&) const = default;
};

/// Throws std::invalid_argument when a radius is not positive, a wheel sits at
/// the body origin, or the stacked constraint matrix loses column rank.
void validate(const KinematicParams& params);

struct BodyTwist {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
};

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// One timestamped sample of the four wheel modules.
struct WheelFrame {
  double t = 0.0;
  WheelVector speed{};       // contact-point speed v_i, m/s
  WheelVector steer{};       // steering angle, rad in [-pi, pi)
  WheelVector wheel_rate{};  // wheel angular speed, rad/s
  WheelVector steer_rate{};  // rad/s
};

struct WheelCommand {
  WheelVector speed{};
  WheelVector steer{};
};

/// Pseudoinverse solution of the stacked per-wheel rigid-body constraints
/// P * twist = R(steer) * v with per-wheel mounting positions. For a
/// geometry symmetric about the body origin this reduces exactly to the
/// row-sum closed form of `body_twist_closed_form`.
BodyTwist body_twist_from_wheels(const KinematicParams& params, const WheelVector& speeds,
                                 const WheelVector& steers);

/// Row-sum closed form: vx = sum c_i v_i / 4, vy = sum s_i v_i / 4,
/// omega = sum K_i v_i with K_i = (-y_i c_i + x_i s_i) / (4 x_i^2 + 4 y_i^2).
/// Equal to the least-squares solution only when sum x_i = sum y_i = 0 and all
/// wheels share the same distance from the origin.
BodyTwist body_twist_closed_form(const KinematicParams& params, const WheelVector& speeds,
                                 const WheelVector& steers);

/// Inverse kinematics. A wheel with zero contact velocity keeps
/// `previous_steer` (or 0 when none is given).
WheelCommand wheels_from_body_twist(const KinematicParams& params, const BodyTwist& twist,
                                    const std::optional<WheelVector>& previous_steer = std::nullopt);

/// Rotates a body-frame twist into the world frame at heading theta.
Eigen::Vector3d rotate_twist(const BodyTwist& twist, double theta);

/// World-frame pose rates (dx, dy, dtheta) for the contact speeds carried by
/// `frame` (speed = wheel_rate * radius).
Eigen::Vector3d pose_derivative(const KinematicParams& params, const Pose2D& pose,
                                const WheelFrame& frame);

/// Precomputed solver for body twists under a fixed parameter set. Holds the
/// inverse normal matrix so repeated evaluations skip validation and the 3x3
/// solve.
class TwistSolver {
 public:
  explicit TwistSolver(const KinematicParams& params);

  const KinematicParams& params() const { return params_; }

  /// Contact speeds given explicitly.
  BodyTwist solve(const WheelVector& speeds, const WheelVector& cos_steer,
                  const WheelVector& sin_steer) const;

  /// Contact speeds derived from wheel rates and this parameter set's radii.
  BodyTwist solve_from_rates(const WheelVector& wheel_rates, const WheelVector& cos_steer,
                             const WheelVector& sin_steer) const;

 private:
  KinematicParams params_;
  Eigen::Matrix3d normal_inverse_;
};

}  // namespace odocal
