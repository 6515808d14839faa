#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "odocal/kalman.hpp"
#include "odocal/kinematics.hpp"
#include "odocal/sensor_sim.hpp"

namespace odocal {

/// Pose belief over (x, y, theta); theta is the only angle component.
using GaussianBelief = Belief<3>;
inline constexpr AngleMask kPoseAngles = 0b100;

/// Odometry prediction model. Process noise is a body-twist covariance held
/// over each step and mapped through the step's twist Jacobian, so the
/// world-frame Q follows the heading and the step length.
struct ProcessModel {
  KinematicParams params;
  Eigen::Matrix3d twist_cov = Eigen::Matrix3d::Zero();

  Eigen::Matrix3d process_noise(const Pose2D& pose, const BodyTwist& twist, double dt) const;
};

enum class MeasurementKind { ImuYaw, VoPose };

struct MeasurementModel {
  MeasurementKind kind = MeasurementKind::VoPose;
  Eigen::MatrixXd noise;  // 1x1 for ImuYaw, 3x3 for VoPose

  static MeasurementModel imu_yaw(double sigma);
  static MeasurementModel vo_pose(double position_sigma, double yaw_sigma);
  Eigen::Index dimension() const { return kind == MeasurementKind::ImuYaw ? 1 : 3; }
};

/// Throws std::invalid_argument on a wrong-sized or non-PSD noise matrix.
void validate(const MeasurementModel& model);

/// Body twist the odometry model assigns to a frame.
BodyTwist frame_twist(const KinematicParams& params, const WheelFrame& frame);

/// dt == 0 returns the belief unchanged; dt < 0 throws.
GaussianBelief ekf_predict(const GaussianBelief& belief, const WheelFrame& frame, double dt,
                           const ProcessModel& model);

/// Analytic Jacobian of the odometry step with respect to the pose.
Eigen::Matrix3d ekf_process_jacobian(const GaussianBelief& belief, const WheelFrame& frame,
                                     double dt, const KinematicParams& params);

UpdateOutcome<3> ekf_update(const GaussianBelief& belief, const Eigen::VectorXd& z,
                            const MeasurementModel& model);

SigmaSet<3> ukf_sigma_points(const GaussianBelief& belief, const UkfConfig& config);

GaussianBelief ukf_predict(const GaussianBelief& belief, const WheelFrame& frame, double dt,
                           const ProcessModel& model, const UkfConfig& config);

UpdateOutcome<3> ukf_update(const GaussianBelief& belief, const Eigen::VectorXd& z,
                            const MeasurementModel& model, const UkfConfig& config);

enum class FilterKind { OdomOnly, EKF, UKF };
std::string_view to_string(FilterKind kind);
FilterKind filter_kind_from_string(std::string_view name);

/// Filter tuning. Measurement sigmas default to `DisturbanceConfig::typical()`.
struct FilterNoise {
  double twist_sigma_linear = 0.05;   // m/s
  double twist_sigma_angular = 0.05;  // rad/s
  double imu_yaw_sigma = 0.005;
  double vo_pos_sigma = 0.01;
  double vo_yaw_sigma = 0.01;
  double initial_pos_sigma = 1e-3;
  double initial_yaw_sigma = 1e-3;
  bool use_imu = true;
  bool use_vo = true;
  UkfConfig ukf;

  /// Tuning matched to a simulator disturbance config.
  static FilterNoise matched(const DisturbanceConfig& disturbance);
};

struct EstimatorRun {
  std::vector<double> t;
  std::vector<Pose2D> poses;            // aligned with the recording frames
  std::vector<Eigen::Matrix3d> covs;
  std::vector<double> nees;             // against the recording truth
  int updates = 0;
  int skipped_updates = 0;
};

/// Fuses one recording. The belief starts at the first ground-truth pose.
/// Time advances with a predict on the current frame's wheel data; an IMU or
/// VO sample is applied at its own timestamp after any predict reaching it
/// (IMU before VO on ties). Samples outside the frame time range are ignored.
/// OdomOnly dead-reckons exactly like `integrate_recording` and propagates
/// the covariance alongside. Throws std::invalid_argument when a channel is
/// not time-ordered.
EstimatorRun run_estimator(const Recording& recording, const KinematicParams& params,
                           FilterKind filter, const FilterNoise& noise = {});

/// e' P^-1 e with e = truth - estimate (heading wrapped); NaN when P is
/// singular.
double nees(const Pose2D& truth, const Pose2D& estimate, const Eigen::Matrix3d& cov);

}  // namespace odocal
