#include "odocal/sensor_sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace odocal {

DisturbanceConfig DisturbanceConfig::typical() {
  DisturbanceConfig c;
  c.imu_yaw_sigma = 0.005;
  c.vo_pos_sigma = 0.01;
  c.vo_yaw_sigma = 0.01;
  return c;
}

void validate(const DisturbanceConfig& c) {
  const double sigmas[] = {c.imu_yaw_sigma, c.vo_pos_sigma, c.vo_yaw_sigma,
                           c.twist_sigma_linear, c.twist_sigma_angular};
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("noise standard deviations must be finite and >= 0");
    }
  }
  for (double slip : c.slip_ratio) {
    if (!(slip >= 0.0 && slip < 1.0)) {
      throw std::invalid_argument("slip_ratio must lie in [0, 1)");
    }
  }
  if (!std::isfinite(c.imu_yaw_bias) || !std::isfinite(c.gravity_drift)) {
    throw std::invalid_argument("imu bias and gravity drift must be finite");
  }
  if (!(c.vo_rate > 0.0)) {
    throw std::invalid_argument("vo_rate must be positive");
  }
}

std::vector<const Recording*> Dataset::of_kind(TrajectoryKind kind) const {
  std::vector<const Recording*> out;
  for (const Recording& r : recordings) {
    if (r.meta.spec.kind == kind) {
      out.push_back(&r);
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Exact pose increment for a body twist held constant over dt.
Pose2D exact_step(const Pose2D& pose, const BodyTwist& twist, double dt) {
  const double dtheta = twist.omega * dt;
  double fx;
  double fy;
  if (std::abs(dtheta) < 1e-9) {
    const double c = std::cos(0.5 * dtheta);
    const double s = std::sin(0.5 * dtheta);
    fx = dt * (c * twist.vx - s * twist.vy);
    fy = dt * (s * twist.vx + c * twist.vy);
  } else {
    const double a = std::sin(dtheta) / twist.omega;
    const double b = (1.0 - std::cos(dtheta)) / twist.omega;
    fx = a * twist.vx - b * twist.vy;
    fy = b * twist.vx + a * twist.vy;
  }
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return {pose.x + c * fx - s * fy, pose.y + s * fx + c * fy, pose.theta + dtheta};
}

std::mt19937_64 channel_engine(std::uint64_t seed, std::uint32_t channel) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    channel};
  return std::mt19937_64(seq);
}

enum Channel : std::uint32_t { kProcess = 1, kImu = 2, kVo = 3 };

}  // namespace

Recording simulate_recording(const KinematicParams& true_params, const TrajectorySpec& spec,
                             const DisturbanceConfig& disturbance,
                             const std::optional<KinematicParams>& command_params) {
  validate(true_params);
  validate(disturbance);
  const KinematicParams& robot = command_params ? *command_params : true_params;
  validate(robot);

  const std::vector<TimedTwist> reference = reference_twists(spec);
  const TwistSolver physics(true_params);

  std::mt19937_64 process_rng = channel_engine(disturbance.rng_seed, kProcess);
  std::mt19937_64 imu_rng = channel_engine(disturbance.rng_seed, kImu);
  std::mt19937_64 vo_rng = channel_engine(disturbance.rng_seed, kVo);
  std::normal_distribution<double> unit(0.0, 1.0);

  Recording rec;
  rec.meta.spec = spec;
  rec.meta.seed = disturbance.rng_seed;
  rec.frames.reserve(reference.size());
  rec.truth.reserve(reference.size());
  rec.imu_yaw.reserve(reference.size());

  std::optional<WheelVector> previous_steer;
  for (const TimedTwist& ref : reference) {
    const WheelCommand cmd = wheels_from_body_twist(robot, ref.twist, previous_steer);
    WheelFrame frame;
    frame.t = ref.t;
    frame.speed = cmd.speed;
    frame.steer = cmd.steer;
    for (int i = 0; i < kWheels; ++i) {
      frame.wheel_rate[i] = cmd.speed[i] / robot.wheel_radius[i];
    }
    if (!rec.frames.empty()) {
      const WheelFrame& prev = rec.frames.back();
      const double dt = frame.t - prev.t;
      for (int i = 0; i < kWheels; ++i) {
        frame.steer_rate[i] = wrap_angle(frame.steer[i] - prev.steer[i]) / dt;
      }
    }
    previous_steer = frame.steer;
    rec.frames.push_back(frame);
  }

  Pose2D truth{};  // continuous heading
  const auto n = rec.frames.size();
  for (std::size_t k = 0; k < n; ++k) {
    rec.truth.push_back({truth.x, truth.y, wrap_angle(truth.theta)});
    if (k + 1 == n) {
      break;
    }
    const WheelFrame& f = rec.frames[k];
    WheelVector contact;
    WheelVector c;
    WheelVector s;
    for (int i = 0; i < kWheels; ++i) {
      contact[i] = f.wheel_rate[i] * true_params.wheel_radius[i] *
                   (1.0 - disturbance.slip_ratio[i]);
      c[i] = std::cos(f.steer[i]);
      s[i] = std::sin(f.steer[i]);
    }
    BodyTwist twist = physics.solve(contact, c, s);
    if (disturbance.twist_sigma_linear > 0.0) {
      twist.vx += disturbance.twist_sigma_linear * unit(process_rng);
      twist.vy += disturbance.twist_sigma_linear * unit(process_rng);
    }
    if (disturbance.twist_sigma_angular > 0.0) {
      twist.omega += disturbance.twist_sigma_angular * unit(process_rng);
    }
    const double t0 = f.t;
    const double t1 = rec.frames[k + 1].t;
    truth = exact_step(truth, twist, t1 - t0);
    truth.x -= 0.5 * disturbance.gravity_drift * (t1 * t1 - t0 * t0);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double t = rec.frames[k].t;
    double yaw = rec.truth[k].theta + disturbance.imu_yaw_bias;
    if (disturbance.imu_yaw_sigma > 0.0) {
      yaw += disturbance.imu_yaw_sigma * unit(imu_rng);
    }
    rec.imu_yaw.push_back({t, wrap_angle(yaw)});
  }

  // VO fires on the first frame at or after each 1/vo_rate tick.
  long last_tick = -1;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = rec.frames[k].t;
    const long tick = static_cast<long>(std::floor(t * disturbance.vo_rate + 1e-9));
    if (tick == last_tick) {
      continue;
    }
    last_tick = tick;
    Pose2D p = rec.truth[k];
    if (disturbance.vo_pos_sigma > 0.0) {
      p.x += disturbance.vo_pos_sigma * unit(vo_rng);
      p.y += disturbance.vo_pos_sigma * unit(vo_rng);
    }
    if (disturbance.vo_yaw_sigma > 0.0) {
      p.theta = wrap_angle(p.theta + disturbance.vo_yaw_sigma * unit(vo_rng));
    }
    rec.vo_pose.push_back({t, p});
  }
  return rec;
}

Dataset make_calibration_dataset(const KinematicParams& true_params,
                                 const DisturbanceConfig& disturbance,
                                 const DatasetOptions& options) {
  if (options.repetitions < 1) {
    throw std::invalid_argument("repetitions must be >= 1");
  }
  std::vector<TrajectorySpec> specs = options.specs;
  if (specs.empty()) {
    for (TrajectoryKind kind : kAllTrajectoryKinds) {
      specs.push_back(TrajectorySpec::defaults(kind));
    }
  }

  Dataset ds;
  ds.true_params = true_params;
  ds.command_params = options.command_params ? *options.command_params : true_params;
  ds.disturbance = disturbance;
  ds.master_seed = disturbance.rng_seed;
  std::uint64_t index = 0;
  for (const TrajectorySpec& spec : specs) {
    for (int rep = 0; rep < options.repetitions; ++rep, ++index) {
      DisturbanceConfig d = disturbance;
      d.rng_seed = derive_seed(disturbance.rng_seed, index);
      Recording rec = simulate_recording(true_params, spec, d, ds.command_params);
      rec.meta.repetition = rep;
      ds.recordings.push_back(std::move(rec));
    }
  }
  return ds;
}

}  // namespace odocal
