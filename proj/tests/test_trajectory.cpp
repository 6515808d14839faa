#include <cmath>

#include <doctest.h>

#include "odocal/trajectory.hpp"

using namespace odocal;

TEST_CASE("quintic profile values") {
  CHECK(quintic_profile(1.0, 1.0, 0.5).position == doctest::Approx(0.5).epsilon(1e-15));
  const QuinticSample start = quintic_profile(1.0, 1.0, 0.0);
  CHECK(start.position == 0.0);
  CHECK(start.velocity == 0.0);
  CHECK(start.acceleration == 0.0);
  const double expected = 2.0 * (10.0 / 64.0 - 15.0 / 256.0 + 6.0 / 1024.0);
  CHECK(quintic_profile(2.0, 4.0, 1.0).position == doctest::Approx(expected).epsilon(1e-15));
  CHECK_THROWS_AS(quintic_profile(1.0, 1.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(quintic_profile(1.0, 1.0, -0.1), std::domain_error);
}

TEST_CASE("quintic boundary derivatives vanish") {
  for (double total : {1.0, -2.0, 2.0 * M_PI}) {
    for (double duration : {1.0, 15.0, 45.0}) {
      const QuinticSample end = quintic_profile(total, duration, duration);
      CHECK(end.position == doctest::Approx(total).epsilon(1e-14));
      CHECK(std::abs(end.velocity) < 1e-12);
      CHECK(std::abs(end.acceleration) < 1e-12);
    }
  }
}

TEST_CASE("quintic velocity is the derivative of position") {
  const double h = 1e-6;
  for (double t = 0.1; t < 9.9; t += 0.7) {
    const double fd = (quintic_profile(3.0, 10.0, t + h).position -
                       quintic_profile(3.0, 10.0, t - h).position) / (2 * h);
    CHECK(quintic_profile(3.0, 10.0, t).velocity == doctest::Approx(fd).epsilon(1e-8));
  }
}

namespace {

// Trapezoidal integral of a twist component; the profile's end derivatives
// vanish, so the trapezoid rule is accurate to high order.
double integrate(const std::vector<TimedTwist>& ts, double BodyTwist::*field) {
  double sum = 0.0;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    sum += 0.5 * (ts[k].t - ts[k - 1].t) * (ts[k].twist.*field + ts[k - 1].twist.*field);
  }
  return sum;
}

}  // namespace

TEST_CASE("line and spin displacements") {
  TrajectorySpec line = TrajectorySpec::defaults(TrajectoryKind::LineX);
  line.duration = 10.0;
  const auto ts = reference_twists(line);
  CHECK(ts.size() == 1001);
  CHECK(ts.back().t == doctest::Approx(10.0));
  CHECK(integrate(ts, &BodyTwist::vx) == doctest::Approx(1.0).epsilon(1e-6));
  for (const auto& s : ts) {
    CHECK(s.twist.vy == 0.0);
    CHECK(s.twist.omega == 0.0);
  }
  TrajectorySpec spin = TrajectorySpec::defaults(TrajectoryKind::SpinCCW);
  spin.length_or_angle = 2 * M_PI;
  spin.duration = 10.0;
  CHECK(integrate(reference_twists(spin), &BodyTwist::omega) ==
        doctest::Approx(2 * M_PI).epsilon(1e-6));
  spin.kind = TrajectoryKind::SpinCW;
  CHECK(integrate(reference_twists(spin), &BodyTwist::omega) ==
        doctest::Approx(-2 * M_PI).epsilon(1e-6));
  const TrajectorySpec y = TrajectorySpec::defaults(TrajectoryKind::LineY);
  CHECK(integrate(reference_twists(y), &BodyTwist::vy) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("circle reference stays on its circle") {
  for (TrajectoryKind kind : {TrajectoryKind::CircleCCW, TrajectoryKind::CircleCW}) {
    const TrajectorySpec spec = TrajectorySpec::defaults(kind);
    const double cy = kind == TrajectoryKind::CircleCCW ? spec.radius : -spec.radius;
    for (double t = 0.0; t <= spec.duration; t += 0.37) {
      const Pose2D p = reference_pose(spec, t);
      CHECK(std::hypot(p.x, p.y - cy) == doctest::Approx(spec.radius).epsilon(1e-12));
      CHECK(p.theta == 0.0);
    }
    const Pose2D end = reference_pose(spec, spec.duration);
    CHECK(std::abs(end.x) < 1e-9);
    CHECK(std::abs(end.y) < 1e-9);
    for (const auto& s : reference_twists(spec)) {
      CHECK(s.twist.omega == 0.0);
    }
  }
}

TEST_CASE("circle twist integrates onto the analytic path") {
  TrajectorySpec spec = TrajectorySpec::defaults(TrajectoryKind::CircleCCW);
  spec.sample_dt = 0.001;
  const auto ts = reference_twists(spec);
  double x = 0.0;
  double y = 0.0;
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double dt = ts[k].t - ts[k - 1].t;
    x += 0.5 * dt * (ts[k].twist.vx + ts[k - 1].twist.vx);
    y += 0.5 * dt * (ts[k].twist.vy + ts[k - 1].twist.vy);
    if (k % 500 == 0) {
      const Pose2D ref = reference_pose(spec, ts[k].t);
      CHECK(std::hypot(x - ref.x, y - ref.y) < 1e-6);
    }
  }
}

TEST_CASE("clockwise variants mirror counter-clockwise ones") {
  const auto ccw = reference_twists(TrajectorySpec::defaults(TrajectoryKind::SpinCCW));
  const auto cw = reference_twists(TrajectorySpec::defaults(TrajectoryKind::SpinCW));
  REQUIRE(ccw.size() == cw.size());
  for (std::size_t k = 0; k < ccw.size(); ++k) {
    CHECK(cw[k].twist.omega == -ccw[k].twist.omega);
  }
  const auto c1 = TrajectorySpec::defaults(TrajectoryKind::CircleCCW);
  const auto c2 = TrajectorySpec::defaults(TrajectoryKind::CircleCW);
  for (double t = 0.0; t <= c1.duration; t += 1.3) {
    CHECK(reference_pose(c2, t).y == doctest::Approx(-reference_pose(c1, t).y));
    CHECK(reference_pose(c2, t).x == doctest::Approx(reference_pose(c1, t).x));
  }
}

TEST_CASE("spec validation and names") {
  TrajectorySpec s = TrajectorySpec::defaults(TrajectoryKind::CircleCW);
  s.radius = 0.0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = TrajectorySpec::defaults(TrajectoryKind::LineX);
  s.duration = 0.0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.duration = 1.0;
  s.sample_dt = -0.1;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  for (TrajectoryKind k : kAllTrajectoryKinds) {
    CHECK(trajectory_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(trajectory_kind_from_string("zigzag"), std::invalid_argument);
}
