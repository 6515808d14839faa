#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "odocal/kinematics.hpp"

using namespace odocal;

namespace {

// Normal-equations solve of the stacked 8x3 rigid-body system.
Eigen::Vector3d normal_equations(const KinematicParams& p, const WheelVector& v,
                                 const WheelVector& steer) {
  Eigen::Matrix<double, 8, 3> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < kWheels; ++i) {
    a.row(2 * i) << 1.0, 0.0, -p.wheel_y[i];
    a.row(2 * i + 1) << 0.0, 1.0, p.wheel_x[i];
    b(2 * i) = v[i] * std::cos(steer[i]);
    b(2 * i + 1) = v[i] * std::sin(steer[i]);
  }
  return (a.transpose() * a).ldlt().solve(a.transpose() * b);
}

Eigen::Vector3d vec(const BodyTwist& t) { return {t.vx, t.vy, t.omega}; }

KinematicParams skewed() {
  KinematicParams p = KinematicParams::nominal();
  p.wheel_x = {0.118, -0.109, -0.117, 0.110};
  p.wheel_y = {0.111, 0.115, -0.108, -0.114};
  p.wheel_radius = {0.0262, 0.0250, 0.0255, 0.0249};
  return p;
}

}  // namespace

TEST_CASE("nominal fixture") {
  const KinematicParams p = KinematicParams::nominal();
  const WheelVector x{0.1125, -0.1125, -0.1125, 0.1125};
  const WheelVector y{0.1125, 0.1125, -0.1125, -0.1125};
  CHECK(p.wheel_x == x);
  CHECK(p.wheel_y == y);
  for (double r : p.wheel_radius) {
    CHECK(r == 0.0254);
  }
}

TEST_CASE("validate rejects bad geometry") {
  KinematicParams p = KinematicParams::nominal();
  p.wheel_radius[2] = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = KinematicParams::nominal();
  p.wheel_x[1] = 0.0;
  p.wheel_y[1] = 0.0;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = KinematicParams::nominal();
  p.wheel_y[0] = std::nan("");
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  // All wheels at one point: omega is unobservable.
  p = KinematicParams::nominal();
  p.wheel_x.fill(0.1);
  p.wheel_y.fill(0.1);
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  CHECK_NOTHROW(validate(KinematicParams::nominal()));
}

TEST_CASE("wrap_angle maps into [-pi, pi)") {
  CHECK(wrap_angle(M_PI) == doctest::Approx(-M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(-M_PI));
  CHECK(wrap_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
  CHECK(wrap_angle(0.25) == 0.25);
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    CHECK(w >= -M_PI);
    CHECK(w < M_PI);
    CHECK(std::abs(std::remainder(w - a, 2 * M_PI)) < 1e-12);
  }
}

TEST_CASE("pure translation") {
  const auto t = body_twist_from_wheels(KinematicParams::nominal(), {0.1, 0.1, 0.1, 0.1}, {});
  CHECK(t.vx == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(std::abs(t.vy) < 1e-15);
  CHECK(std::abs(t.omega) < 1e-15);
}

TEST_CASE("tangential steering gives a pure spin") {
  const KinematicParams p = KinematicParams::nominal();
  const double v = 0.12;
  WheelVector steer;
  for (int i = 0; i < kWheels; ++i) {
    steer[i] = std::atan2(p.wheel_x[i], -p.wheel_y[i]);
  }
  const WheelVector speeds{v, v, v, v};
  const Eigen::Vector3d oracle = normal_equations(p, speeds, steer);
  const double expected = v / std::hypot(p.wheel_x[0], p.wheel_y[0]);
  CHECK(oracle[2] == doctest::Approx(expected).epsilon(1e-12));
  for (const BodyTwist& t :
       {body_twist_from_wheels(p, speeds, steer), body_twist_closed_form(p, speeds, steer)}) {
    CHECK(std::abs(t.vx) < 1e-15);
    CHECK(std::abs(t.vy) < 1e-15);
    CHECK(t.omega == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("least-squares solve matches the normal equations for asymmetric geometry") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const KinematicParams p = skewed();
  for (int n = 0; n < 200; ++n) {
    WheelVector v;
    WheelVector s;
    for (int i = 0; i < kWheels; ++i) {
      v[i] = 0.3 * u(rng);
      s[i] = M_PI * u(rng);
    }
    const Eigen::Vector3d oracle = normal_equations(p, v, s);
    CHECK((vec(body_twist_from_wheels(p, v, s)) - oracle).norm() <= 1e-10 * oracle.norm());
  }
}

TEST_CASE("closed form departs from least squares when the geometry is asymmetric") {
  const KinematicParams p = skewed();
  const WheelVector v{0.1, 0.12, 0.09, 0.11};
  const WheelVector s{0.3, 0.1, -0.2, 0.4};
  const Eigen::Vector3d ls = vec(body_twist_from_wheels(p, v, s));
  const Eigen::Vector3d cf = vec(body_twist_closed_form(p, v, s));
  CHECK((ls - cf).norm() > 1e-6);
}

TEST_CASE("inverse kinematics") {
  const KinematicParams p = KinematicParams::nominal();
  SUBCASE("translation") {
    const WheelCommand c = wheels_from_body_twist(p, {0.1, 0.0, 0.0});
    for (int i = 0; i < kWheels; ++i) {
      CHECK(c.speed[i] == doctest::Approx(0.1));
      CHECK(c.steer[i] == 0.0);
    }
  }
  SUBCASE("unit spin") {
    const WheelCommand c = wheels_from_body_twist(p, {0.0, 0.0, 1.0});
    for (int i = 0; i < kWheels; ++i) {
      // Wheel velocity (-omega y_i, omega x_i).
      CHECK(c.speed[i] == doctest::Approx(std::sqrt(0.1125 * 0.1125 * 2)).epsilon(1e-14));
      CHECK(c.steer[i] == doctest::Approx(std::atan2(p.wheel_x[i], -p.wheel_y[i])));
    }
    CHECK(c.speed[0] == doctest::Approx(0.15910).epsilon(1e-4));
  }
  SUBCASE("zero twist keeps the previous steering") {
    const WheelCommand zero = wheels_from_body_twist(p, {});
    for (int i = 0; i < kWheels; ++i) {
      CHECK(zero.speed[i] == 0.0);
      CHECK(zero.steer[i] == 0.0);
    }
    const WheelVector previous{0.1, 0.2, -0.3, 1.0};
    CHECK(wheels_from_body_twist(p, {}, previous).steer == previous);
  }
}

TEST_CASE("round trip on a perturbed geometry") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const KinematicParams p = skewed();
  for (int n = 0; n < 500; ++n) {
    const BodyTwist t{0.3 * u(rng), 0.3 * u(rng), 2.0 * u(rng)};
    const WheelCommand c = wheels_from_body_twist(p, t);
    CHECK((vec(body_twist_from_wheels(p, c.speed, c.steer)) - vec(t)).norm() < 1e-10);
  }
}

TEST_CASE("pose derivative rotates the body twist") {
  const KinematicParams p = KinematicParams::nominal();
  WheelFrame f;
  f.speed = {0.1, 0.1, 0.1, 0.1};
  for (int i = 0; i < kWheels; ++i) {
    f.wheel_rate[i] = 0.1 / p.wheel_radius[i];
  }
  const Eigen::Vector3d at_zero = pose_derivative(p, {0, 0, 0}, f);
  CHECK(at_zero[0] == doctest::Approx(0.1));
  const Eigen::Vector3d quarter = pose_derivative(p, {0, 0, M_PI / 2}, f);
  CHECK(std::abs(quarter[0]) < 1e-15);
  CHECK(quarter[1] == doctest::Approx(0.1));
  CHECK(std::abs(quarter[2]) < 1e-15);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < kWheels; ++i) {
    f.steer[i] = M_PI * u(rng);
    f.wheel_rate[i] = 4.0 * u(rng);
  }
  WheelVector speeds;
  for (int i = 0; i < kWheels; ++i) {
    speeds[i] = f.wheel_rate[i] * p.wheel_radius[i];
  }
  const BodyTwist body = body_twist_from_wheels(p, speeds, f.steer);
  const double th = 0.3;
  const Eigen::Vector3d d = pose_derivative(p, {1.0, 2.0, th}, f);
  CHECK(d[0] == doctest::Approx(std::cos(th) * body.vx - std::sin(th) * body.vy));
  CHECK(d[1] == doctest::Approx(std::sin(th) * body.vx + std::cos(th) * body.vy));
  CHECK(d[2] == doctest::Approx(body.omega));
}

TEST_CASE("TwistSolver agrees with the free function") {
  const KinematicParams p = skewed();
  const TwistSolver solver(p);
  const WheelVector rates{3.0, -1.0, 2.5, 0.5};
  const WheelVector steer{0.2, -1.0, 2.0, 3.0};
  WheelVector c;
  WheelVector s;
  WheelVector speeds;
  for (int i = 0; i < kWheels; ++i) {
    c[i] = std::cos(steer[i]);
    s[i] = std::sin(steer[i]);
    speeds[i] = rates[i] * p.wheel_radius[i];
  }
  const Eigen::Vector3d a = vec(solver.solve_from_rates(rates, c, s));
  const Eigen::Vector3d b = vec(body_twist_from_wheels(p, speeds, steer));
  CHECK((a - b).norm() < 1e-15);
}
