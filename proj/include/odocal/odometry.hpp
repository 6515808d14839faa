#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "odocal/kinematics.hpp"

namespace odocal {

struct OdometryState {
  Pose2D pose;           // theta kept continuous during integration
  WheelVector wheel_angle{};  // accumulated wheel rotation, rad, unwrapped
  double t = 0.0;
};

/// One explicit-midpoint step of the planar kinematic model under the frame's
/// wheel rates and steering angles, held constant over dt. The returned pose
/// theta is not wrapped.
OdometryState step(const KinematicParams& params, const OdometryState& state,
                   const WheelFrame& frame, double dt);

/// Midpoint pose update for a body twist held over dt.
Pose2D midpoint_step(const Pose2D& pose, const BodyTwist& twist, double dt);

/// Jacobian of `midpoint_step` with respect to (x, y, theta).
Eigen::Matrix3d midpoint_state_jacobian(const Pose2D& pose, const BodyTwist& twist, double dt);

/// Jacobian of `midpoint_step` with respect to the body twist (vx, vy, omega).
Eigen::Matrix3d midpoint_twist_jacobian(const Pose2D& pose, const BodyTwist& twist, double dt);

/// Dead-reckoned pose trace aligned 1:1 with the frames. Pose k+1 advances
/// pose k with frame k over t_{k+1} - t_k. Headings in the output are wrapped.
/// Throws std::invalid_argument naming the first index whose timestamp does
/// not strictly increase.
std::vector<Pose2D> integrate_recording(const KinematicParams& params,
                                        std::span<const WheelFrame> frames,
                                        const Pose2D& initial);

/// Frames with steering trigonometry precomputed, so a recording can be
/// re-integrated under many parameter sets cheaply.
class PreparedFrames {
 public:
  explicit PreparedFrames(std::span<const WheelFrame> frames);

  std::size_t size() const { return t_.size(); }

  /// Same contract as `integrate_recording` given a prepared solver.
  void integrate(const TwistSolver& solver, const Pose2D& initial,
                 std::vector<Pose2D>& out) const;

 private:
  std::vector<double> t_;
  std::vector<WheelVector> rate_;
  std::vector<WheelVector> cos_;
  std::vector<WheelVector> sin_;
};

}  // namespace odocal
