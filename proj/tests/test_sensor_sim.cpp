#include <cmath>

#include <doctest.h>

#include "odocal/odometry.hpp"
#include "odocal/sensor_sim.hpp"

using namespace odocal;

namespace {

bool same(const Recording& a, const Recording& b) {
  if (a.frames.size() != b.frames.size() || a.imu_yaw != b.imu_yaw ||
      a.vo_pose.size() != b.vo_pose.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    const WheelFrame& f = a.frames[k];
    const WheelFrame& g = b.frames[k];
    if (f.t != g.t || f.speed != g.speed || f.steer != g.steer || f.wheel_rate != g.wheel_rate ||
        f.steer_rate != g.steer_rate || a.truth[k].x != b.truth[k].x ||
        a.truth[k].y != b.truth[k].y || a.truth[k].theta != b.truth[k].theta) {
      return false;
    }
  }
  for (std::size_t k = 0; k < a.vo_pose.size(); ++k) {
    if (a.vo_pose[k].t != b.vo_pose[k].t || a.vo_pose[k].pose.x != b.vo_pose[k].pose.x) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("noise-free recordings agree with odometry") {
  const KinematicParams p = KinematicParams::nominal();
  for (TrajectoryKind kind : kAllTrajectoryKinds) {
    const Recording rec = simulate_recording(p, TrajectorySpec::defaults(kind), {});
    REQUIRE(rec.frames.size() == rec.truth.size());
    const auto odo = integrate_recording(p, rec.frames, rec.truth.front());
    double worst = 0.0;
    for (std::size_t k = 0; k < odo.size(); ++k) {
      worst = std::max(worst, std::hypot(odo[k].x - rec.truth[k].x, odo[k].y - rec.truth[k].y));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("frames carry consistent encoder data") {
  KinematicParams truth = KinematicParams::nominal();
  truth.wheel_radius[0] *= 1.03;
  const Recording rec = simulate_recording(
      truth, TrajectorySpec::defaults(TrajectoryKind::CircleCCW), {}, KinematicParams::nominal());
  for (const WheelFrame& f : rec.frames) {
    for (int i = 0; i < kWheels; ++i) {
      // Encoders report the commanded rate under the believed radius.
      CHECK(std::abs(f.wheel_rate[i] * 0.0254 - f.speed[i]) < 1e-12);
      CHECK(f.steer[i] >= -M_PI);
      CHECK(f.steer[i] < M_PI);
    }
  }
}

TEST_CASE("slip shortens the true path") {
  DisturbanceConfig d;
  d.slip_ratio.fill(0.1);
  const KinematicParams p = KinematicParams::nominal();
  const Recording rec = simulate_recording(p, TrajectorySpec::defaults(TrajectoryKind::LineX), d);
  CHECK(rec.truth.back().x == doctest::Approx(0.9).epsilon(1e-3));
  CHECK(integrate_recording(p, rec.frames, {}).back().x == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("gravity drift pushes line_y towards -x") {
  const KinematicParams p = KinematicParams::nominal();
  const TrajectorySpec spec = TrajectorySpec::defaults(TrajectoryKind::LineY);
  double previous_end = 0.0;
  for (double g : {0.0005, 0.001, 0.002}) {
    DisturbanceConfig d;
    d.gravity_drift = g;
    const Recording rec = simulate_recording(p, spec, d);
    for (std::size_t k = 1; k < rec.truth.size(); ++k) {
      CHECK(rec.truth[k].x <= rec.truth[k - 1].x);
    }
    CHECK(rec.truth.back().x < previous_end);
    CHECK(rec.truth.back().x == doctest::Approx(-0.5 * g * spec.duration * spec.duration));
    previous_end = rec.truth.back().x;
  }
}

TEST_CASE("sensor channels: rates and noise statistics") {
  DisturbanceConfig d;
  d.imu_yaw_sigma = 0.02;
  d.imu_yaw_bias = 0.01;
  d.vo_pos_sigma = 0.03;
  d.rng_seed = 77;
  const KinematicParams p = KinematicParams::nominal();
  TrajectorySpec spec = TrajectorySpec::defaults(TrajectoryKind::LineX);
  spec.duration = 150.0;
  const Recording rec = simulate_recording(p, spec, d);
  REQUIRE(rec.imu_yaw.size() == rec.frames.size());
  const std::size_t n = rec.imu_yaw.size();
  CHECK(n >= 10000);
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mean += wrap_angle(rec.imu_yaw[k].yaw - rec.truth[k].theta);
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = wrap_angle(rec.imu_yaw[k].yaw - rec.truth[k].theta) - mean;
    var += e * e;
  }
  var /= static_cast<double>(n - 1);
  CHECK(std::abs(mean - d.imu_yaw_bias) < 4.0 * d.imu_yaw_sigma / std::sqrt(double(n)));
  CHECK(std::abs(var / (d.imu_yaw_sigma * d.imu_yaw_sigma) - 1.0) < 0.2);

  // VO at 30 Hz: one sample per tick, stamped on a frame time.
  CHECK(rec.vo_pose.size() == doctest::Approx(30.0 * spec.duration).epsilon(0.01));
  for (std::size_t k = 1; k < rec.vo_pose.size(); ++k) {
    CHECK(rec.vo_pose[k].t > rec.vo_pose[k - 1].t);
  }
}

TEST_CASE("recordings are deterministic per seed") {
  DisturbanceConfig d = DisturbanceConfig::typical();
  d.twist_sigma_linear = 0.01;
  d.rng_seed = 5;
  const TrajectorySpec spec = TrajectorySpec::defaults(TrajectoryKind::SpinCW);
  const KinematicParams p = KinematicParams::nominal();
  CHECK(same(simulate_recording(p, spec, d), simulate_recording(p, spec, d)));
  DisturbanceConfig other = d;
  other.rng_seed = 6;
  CHECK_FALSE(same(simulate_recording(p, spec, d), simulate_recording(p, spec, other)));
}

TEST_CASE("calibration dataset layout") {
  DisturbanceConfig d = DisturbanceConfig::typical();
  d.rng_seed = 3;
  const Dataset ds = make_calibration_dataset(KinematicParams::nominal(), d);
  CHECK(ds.recordings.size() == 30);
  for (TrajectoryKind kind : kAllTrajectoryKinds) {
    CHECK(ds.of_kind(kind).size() == 5);
  }
  const Dataset again = make_calibration_dataset(KinematicParams::nominal(), d);
  for (std::size_t i = 0; i < ds.recordings.size(); ++i) {
    CHECK(same(ds.recordings[i], again.recordings[i]));
  }
  // Repetitions differ in their noise.
  CHECK_FALSE(same(ds.recordings[0], ds.recordings[1]));
}

TEST_CASE("disturbance validation") {
  DisturbanceConfig d;
  d.slip_ratio[2] = 1.0;
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
  d = {};
  d.vo_pos_sigma = -1.0;
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
  d = {};
  d.vo_rate = 0.0;
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
}
