#include "odocal/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "odocal/odometry.hpp"

namespace odocal {

namespace {

Vec<3> to_vec(const Pose2D& p) { return {p.x, p.y, p.theta}; }
Pose2D to_pose(const Vec<3>& v) { return {v[0], v[1], v[2]}; }

void check_dt(double dt) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("filter predict requires a finite dt >= 0");
  }
}

}  // namespace

Eigen::Matrix3d ProcessModel::process_noise(const Pose2D& pose, const BodyTwist& twist,
                                            double dt) const {
  const Eigen::Matrix3d g = midpoint_twist_jacobian(pose, twist, dt);
  return symmetrize<3>(g * twist_cov * g.transpose());
}

MeasurementModel MeasurementModel::imu_yaw(double sigma) {
  MeasurementModel m;
  m.kind = MeasurementKind::ImuYaw;
  m.noise = Eigen::MatrixXd::Constant(1, 1, sigma * sigma);
  return m;
}

MeasurementModel MeasurementModel::vo_pose(double position_sigma, double yaw_sigma) {
  MeasurementModel m;
  m.kind = MeasurementKind::VoPose;
  m.noise = Eigen::Vector3d(position_sigma * position_sigma, position_sigma * position_sigma,
                            yaw_sigma * yaw_sigma)
                .asDiagonal();
  return m;
}

void validate(const MeasurementModel& model) {
  const Eigen::Index n = model.dimension();
  if (model.noise.rows() != n || model.noise.cols() != n) {
    throw std::invalid_argument("measurement noise has the wrong size");
  }
  if (!model.noise.allFinite() || (model.noise - model.noise.transpose()).norm() > 1e-12) {
    throw std::invalid_argument("measurement noise must be finite and symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.noise);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("measurement noise must be positive semi-definite");
  }
}

BodyTwist frame_twist(const KinematicParams& params, const WheelFrame& frame) {
  WheelVector speeds;
  for (int i = 0; i < kWheels; ++i) {
    speeds[i] = frame.wheel_rate[i] * params.wheel_radius[i];
  }
  return body_twist_from_wheels(params, speeds, frame.steer);
}

Eigen::Matrix3d ekf_process_jacobian(const GaussianBelief& belief, const WheelFrame& frame,
                                     double dt, const KinematicParams& params) {
  return midpoint_state_jacobian(to_pose(belief.mean), frame_twist(params, frame), dt);
}

namespace {

GaussianBelief ekf_predict_twist(const GaussianBelief& belief, const BodyTwist& twist,
                                 double dt, const ProcessModel& model) {
  const Pose2D pose = to_pose(belief.mean);
  Pose2D next = midpoint_step(pose, twist, dt);
  next.theta = wrap_angle(next.theta);
  return ekf_predict_linearized<3>(belief, to_vec(next),
                                   midpoint_state_jacobian(pose, twist, dt),
                                   model.process_noise(pose, twist, dt));
}

GaussianBelief ukf_predict_twist(const GaussianBelief& belief, const BodyTwist& twist,
                                 double dt, const ProcessModel& model,
                                 const UkfConfig& config) {
  const auto f = [&](const Vec<3>& x) { return to_vec(midpoint_step(to_pose(x), twist, dt)); };
  const Eigen::Matrix3d q = model.process_noise(to_pose(belief.mean), twist, dt);
  return ukf_predict_generic<3>(belief, f, q, config, kPoseAngles);
}

}  // namespace

GaussianBelief ekf_predict(const GaussianBelief& belief, const WheelFrame& frame, double dt,
                           const ProcessModel& model) {
  check_dt(dt);
  if (dt == 0.0) {
    return belief;
  }
  return ekf_predict_twist(belief, frame_twist(model.params, frame), dt, model);
}

UpdateOutcome<3> ekf_update(const GaussianBelief& belief, const Eigen::VectorXd& z,
                            const MeasurementModel& model) {
  validate(model);
  if (z.size() != model.dimension()) {
    throw std::invalid_argument("measurement has the wrong dimension");
  }
  if (model.kind == MeasurementKind::ImuYaw) {
    const Mat<1, 3> c(0.0, 0.0, 1.0);
    return ekf_update_linearized<3, 1>(belief, Vec<1>(z[0]), Vec<1>(belief.mean[2]), c,
                                       Mat<1>(model.noise(0, 0)), kPoseAngles, 0b1);
  }
  return ekf_update_linearized<3, 3>(belief, Vec<3>(z), belief.mean, Mat<3>::Identity(),
                                     Mat<3>(model.noise), kPoseAngles, kPoseAngles);
}

SigmaSet<3> ukf_sigma_points(const GaussianBelief& belief, const UkfConfig& config) {
  return sigma_points<3>(belief, config, kPoseAngles);
}

GaussianBelief ukf_predict(const GaussianBelief& belief, const WheelFrame& frame, double dt,
                           const ProcessModel& model, const UkfConfig& config) {
  check_dt(dt);
  if (dt == 0.0) {
    return belief;
  }
  return ukf_predict_twist(belief, frame_twist(model.params, frame), dt, model, config);
}

UpdateOutcome<3> ukf_update(const GaussianBelief& belief, const Eigen::VectorXd& z,
                            const MeasurementModel& model, const UkfConfig& config) {
  validate(model);
  if (z.size() != model.dimension()) {
    throw std::invalid_argument("measurement has the wrong dimension");
  }
  if (model.kind == MeasurementKind::ImuYaw) {
    const auto h = [](const Vec<3>& x) { return Vec<1>(x[2]); };
    return ukf_update_generic<3, 1>(belief, Vec<1>(z[0]), h, Mat<1>(model.noise(0, 0)), config,
                                    kPoseAngles, 0b1);
  }
  const auto h = [](const Vec<3>& x) { return x; };
  return ukf_update_generic<3, 3>(belief, Vec<3>(z), h, Mat<3>(model.noise), config,
                                  kPoseAngles, kPoseAngles);
}

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::OdomOnly: return "odom";
    case FilterKind::EKF: return "ekf";
    case FilterKind::UKF: return "ukf";
  }
  return "unknown";
}

FilterKind filter_kind_from_string(std::string_view name) {
  for (FilterKind k : {FilterKind::OdomOnly, FilterKind::EKF, FilterKind::UKF}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw std::invalid_argument("unknown filter '" + std::string(name) + "'");
}

FilterNoise FilterNoise::matched(const DisturbanceConfig& d) {
  FilterNoise n;
  n.twist_sigma_linear = d.twist_sigma_linear;
  n.twist_sigma_angular = d.twist_sigma_angular;
  n.imu_yaw_sigma = d.imu_yaw_sigma;
  n.vo_pos_sigma = d.vo_pos_sigma;
  n.vo_yaw_sigma = d.vo_yaw_sigma;
  return n;
}

double nees(const Pose2D& truth, const Pose2D& estimate, const Eigen::Matrix3d& cov) {
  const Eigen::Vector3d e(truth.x - estimate.x, truth.y - estimate.y,
                          wrap_angle(truth.theta - estimate.theta));
  const Eigen::LLT<Eigen::Matrix3d> llt(cov);
  if (llt.info() != Eigen::Success) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return e.dot(llt.solve(e));
}

namespace {

template <class T>
void check_ordered(const std::vector<T>& samples, const char* channel) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t < samples[i - 1].t) {
      throw std::invalid_argument(std::string(channel) +
                                  " samples are not time-ordered at index " + std::to_string(i));
    }
  }
}

}  // namespace

EstimatorRun run_estimator(const Recording& recording, const KinematicParams& params,
                           FilterKind filter, const FilterNoise& noise) {
  const auto& frames = recording.frames;
  if (recording.truth.size() != frames.size()) {
    throw std::invalid_argument("recording truth is not aligned with its frames");
  }
  for (std::size_t k = 1; k < frames.size(); ++k) {
    if (!(frames[k].t > frames[k - 1].t)) {
      throw std::invalid_argument("frame timestamps must strictly increase; violated at index " +
                                  std::to_string(k));
    }
  }
  check_ordered(recording.imu_yaw, "imu");
  check_ordered(recording.vo_pose, "vo");
  validate(noise.ukf, 3);

  EstimatorRun run;
  if (frames.empty()) {
    return run;
  }

  ProcessModel model;
  model.params = params;
  validate(params);
  model.twist_cov = Eigen::Vector3d(noise.twist_sigma_linear * noise.twist_sigma_linear,
                                    noise.twist_sigma_linear * noise.twist_sigma_linear,
                                    noise.twist_sigma_angular * noise.twist_sigma_angular)
                        .asDiagonal();
  const MeasurementModel imu = MeasurementModel::imu_yaw(noise.imu_yaw_sigma);
  const MeasurementModel vo = MeasurementModel::vo_pose(noise.vo_pos_sigma, noise.vo_yaw_sigma);

  GaussianBelief belief;
  belief.mean = to_vec(recording.truth.front());
  belief.mean[2] = wrap_angle(belief.mean[2]);
  belief.cov = Eigen::Vector3d(noise.initial_pos_sigma * noise.initial_pos_sigma,
                               noise.initial_pos_sigma * noise.initial_pos_sigma,
                               noise.initial_yaw_sigma * noise.initial_yaw_sigma)
                   .asDiagonal();

  std::vector<Pose2D> odom;
  if (filter == FilterKind::OdomOnly) {
    odom = integrate_recording(params, frames, recording.truth.front());
  }

  const bool fuse = filter != FilterKind::OdomOnly;
  std::size_t next_imu = 0;
  std::size_t next_vo = 0;
  const double t_first = frames.front().t;
  while (next_imu < recording.imu_yaw.size() && recording.imu_yaw[next_imu].t < t_first) {
    ++next_imu;
  }
  while (next_vo < recording.vo_pose.size() && recording.vo_pose[next_vo].t < t_first) {
    ++next_vo;
  }

  auto apply = [&](const Eigen::VectorXd& z, const MeasurementModel& m) {
    const UpdateOutcome<3> out = filter == FilterKind::EKF ? ekf_update(belief, z, m)
                                                           : ukf_update(belief, z, m, noise.ukf);
    ++run.updates;
    if (out.skipped) {
      ++run.skipped_updates;
    } else {
      belief = out.belief;
    }
  };
  // Applies every sample stamped exactly at t.
  auto update_at = [&](double t) {
    if (!fuse) {
      return;
    }
    while (next_imu < recording.imu_yaw.size() && recording.imu_yaw[next_imu].t == t) {
      if (noise.use_imu) {
        apply(Eigen::VectorXd::Constant(1, recording.imu_yaw[next_imu].yaw), imu);
      }
      ++next_imu;
    }
    while (next_vo < recording.vo_pose.size() && recording.vo_pose[next_vo].t == t) {
      if (noise.use_vo) {
        const Pose2D& p = recording.vo_pose[next_vo].pose;
        apply(Eigen::Vector3d(p.x, p.y, p.theta), vo);
      }
      ++next_vo;
    }
  };
  auto predict = [&](const BodyTwist& twist, double dt) {
    if (dt <= 0.0) {
      return;
    }
    belief = filter == FilterKind::UKF ? ukf_predict_twist(belief, twist, dt, model, noise.ukf)
                                       : ekf_predict_twist(belief, twist, dt, model);
  };
  auto record = [&](std::size_t k) {
    run.t.push_back(frames[k].t);
    Pose2D pose = to_pose(belief.mean);
    if (filter == FilterKind::OdomOnly) {
      pose = odom[k];
    }
    run.poses.push_back(pose);
    run.covs.push_back(belief.cov);
    run.nees.push_back(nees(recording.truth[k], pose, belief.cov));
  };

  update_at(t_first);
  record(0);
  for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
    const BodyTwist twist = frame_twist(params, frames[k]);
    const double target = frames[k + 1].t;
    double now = frames[k].t;
    if (fuse) {
      while (true) {
        double next_t = target;
        if (next_imu < recording.imu_yaw.size()) {
          next_t = std::min(next_t, recording.imu_yaw[next_imu].t);
        }
        if (next_vo < recording.vo_pose.size()) {
          next_t = std::min(next_t, recording.vo_pose[next_vo].t);
        }
        if (!(next_t < target)) {
          break;
        }
        predict(twist, next_t - now);
        now = next_t;
        update_at(next_t);
      }
    }
    if (filter == FilterKind::OdomOnly) {
      // Covariance follows the dead-reckoned trace exactly.
      belief.mean = to_vec(odom[k]);
    }
    predict(twist, target - now);
    update_at(target);
    record(k + 1);
  }
  return run;
}

}  // namespace odocal
