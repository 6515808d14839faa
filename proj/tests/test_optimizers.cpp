#include <cmath>

#include <Eigen/Dense>
#include <doctest.h>

#include "odocal/least_squares.hpp"

using namespace odocal;

namespace {

Bounds wide(int n) {
  Bounds b;
  b.lower = Eigen::VectorXd::Constant(n, -10.0);
  b.upper = Eigen::VectorXd::Constant(n, 10.0);
  return b;
}

FunctionProblem linear_problem(const Eigen::MatrixXd& a, const Eigen::VectorXd& z_star) {
  return FunctionProblem(a.cols(), a.rows(), [a, z_star](const Eigen::VectorXd& z,
                                                         Eigen::VectorXd& r) {
    r = a * (z - z_star);
  });
}

FunctionProblem rosenbrock() {
  return FunctionProblem(2, 2, [](const Eigen::VectorXd& z, Eigen::VectorXd& r) {
    r[0] = 10.0 * (z[1] - z[0] * z[0]);
    r[1] = 1.0 - z[0];
  });
}

// Sphere residuals r = z - c in 12 dimensions.
FunctionProblem sphere(const Eigen::VectorXd& c) {
  return FunctionProblem(c.size(), c.size(),
                         [c](const Eigen::VectorXd& z, Eigen::VectorXd& r) { r = z - c; });
}

}  // namespace

TEST_CASE("bounds") {
  const Bounds b = Bounds::relative(Eigen::Vector2d(2.0, -4.0), 0.05);
  CHECK(b.lower[0] == doctest::Approx(1.9));
  CHECK(b.upper[0] == doctest::Approx(2.1));
  CHECK(b.lower[1] == doctest::Approx(-4.2));
  CHECK(b.upper[1] == doctest::Approx(-3.8));
  CHECK(b.contains(Eigen::Vector2d(1.9, -4.0)));
  CHECK_FALSE(b.strictly_contains(Eigen::Vector2d(1.9, -4.0)));
  CHECK(b.clamp(Eigen::Vector2d(5.0, -5.0)) == Eigen::Vector2d(2.1, -4.2));
  Bounds bad = b;
  bad.lower[0] = 3.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("forward Jacobian matches central differences") {
  const FunctionProblem p = rosenbrock();
  const Eigen::Vector2d z(0.3, -0.7);
  Eigen::VectorXd r0;
  p.residuals(z, r0);
  const Eigen::MatrixXd f = forward_jacobian(p, z, r0, nullptr);
  const Eigen::MatrixXd c = central_jacobian(p, z);
  CHECK((f - c).norm() / c.norm() < 1e-4);
  // Steps backwards at the upper face.
  Bounds b = wide(2);
  b.upper[0] = 0.3;
  const Eigen::MatrixXd fb = forward_jacobian(p, z, r0, &b);
  CHECK((fb - c).norm() / c.norm() < 1e-4);
}

TEST_CASE("LM solves a linear residual in a few accepted steps") {
  Eigen::MatrixXd a(5, 3);
  a << 1, 2, 0, 0, 1, 1, 3, 0, 1, 1, 1, 1, 0, 2, 5;
  const Eigen::Vector3d z_star(0.5, -1.0, 2.0);
  const FunctionProblem p = linear_problem(a, z_star);
  LmOptions o;
  o.initial_damping = 1e-9;
  const OptimizationResult r = levenberg_marquardt(p, Eigen::Vector3d::Zero(), wide(3), o);
  CHECK((r.solution - z_star).norm() < 1e-6);
  CHECK(r.iterations <= 3);
}

TEST_CASE("heavy damping gives the gradient direction") {
  const FunctionProblem p = rosenbrock();
  const Linearization lin = linearize(p, Eigen::Vector2d(-1.2, 1.0), wide(2));
  const Eigen::VectorXd grad = lin.jacobian.transpose() * lin.residuals;
  // Scaled damping approaches -diag(J'J)^-1 J'r; compare in that metric.
  const Eigen::VectorXd d = lm_direction(lin, 1e9);
  const Eigen::VectorXd scaled =
      (lin.jacobian.transpose() * lin.jacobian).diagonal().cwiseInverse().asDiagonal() * -grad;
  CHECK(d.dot(scaled) / (d.norm() * scaled.norm()) > 0.99);
  CHECK(d.dot(-grad) > 0.0);
}

TEST_CASE("LM minimizes Rosenbrock and never leaves the box") {
  const FunctionProblem p = rosenbrock();
  const OptimizationResult r = levenberg_marquardt(p, Eigen::Vector2d(-1.2, 1.0), wide(2));
  CHECK((r.solution - Eigen::Vector2d(1, 1)).norm() < 1e-6);
  for (std::size_t k = 1; k < r.cost_history.size(); ++k) {
    CHECK(r.cost_history[k] <= r.cost_history[k - 1]);
  }
  Bounds b = wide(2);
  b.upper[0] = 0.5;
  const OptimizationResult c = levenberg_marquardt(p, Eigen::Vector2d(-1.2, 1.0), b);
  CHECK(c.solution[0] <= 0.5);
  CHECK(c.solution[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("LM started at the optimum stops immediately") {
  const FunctionProblem p = rosenbrock();
  const OptimizationResult r = levenberg_marquardt(p, Eigen::Vector2d(1, 1), wide(2));
  CHECK(r.iterations <= 1);
  CHECK(r.final_cost == r.initial_cost);
}

TEST_CASE("interior point: interior and boundary optima") {
  const Eigen::Vector3d z_star(0.5, -1.0, 2.0);
  const FunctionProblem p = linear_problem(Eigen::Matrix3d::Identity() * 2.0, z_star);
  const OptimizationResult r = interior_point_minimize(p, Eigen::Vector3d::Zero(), wide(3));
  CHECK((r.solution - z_star).norm() < 1e-6);

  // 1-D toy with minimizer at 3 and box [0, 1]: optimum on the face z = 1.
  const FunctionProblem toy(1, 1, [](const Eigen::VectorXd& z, Eigen::VectorXd& res) {
    res[0] = z[0] - 3.0;
  });
  Bounds b;
  b.lower = Eigen::VectorXd::Constant(1, 0.0);
  b.upper = Eigen::VectorXd::Constant(1, 1.0);
  const OptimizationResult face = interior_point_minimize(toy, Eigen::VectorXd::Constant(1, 0.5), b);
  CHECK(face.solution[0] < 1.0);
  CHECK(face.solution[0] > 1.0 - 1e-4);
  for (const Eigen::VectorXd& z : face.iterates) {
    CHECK(b.strictly_contains(z));
  }
}

TEST_CASE("genetic algorithm on the 12-D sphere") {
  Eigen::VectorXd c(12);
  for (int i = 0; i < 12; ++i) {
    c[i] = 0.1 * (i - 6);
  }
  const FunctionProblem p = sphere(c);
  Bounds b;
  b.lower = Eigen::VectorXd::Constant(12, -1.0);
  b.upper = Eigen::VectorXd::Constant(12, 1.0);
  GaOptions o;
  o.population = 100;
  o.generations = 200;
  o.seed = 7;
  const OptimizationResult r = ga_minimize(p, b, o);
  CHECK(r.final_cost < 1e-3);
  CHECK(b.contains(r.solution));
  for (std::size_t k = 1; k < r.cost_history.size(); ++k) {
    CHECK(r.cost_history[k] <= r.cost_history[k - 1]);
  }
  const OptimizationResult again = ga_minimize(p, b, o);
  CHECK(again.solution == r.solution);
  CHECK(again.final_cost == r.final_cost);
}

TEST_CASE("seed point is kept by the stochastic searches") {
  Eigen::VectorXd c = Eigen::VectorXd::Constant(12, 0.25);
  const FunctionProblem p = sphere(c);
  GaOptions g;
  g.generations = 1;
  CHECK(ga_minimize(p, wide(12), g, c).final_cost == 0.0);
  PsoOptions s;
  s.iterations = 1;
  CHECK(pso_minimize(p, wide(12), s, c).final_cost == 0.0);
}

TEST_CASE("particle swarm on the 12-D sphere") {
  Eigen::VectorXd c(12);
  for (int i = 0; i < 12; ++i) {
    c[i] = 0.2 * (i - 5);
  }
  const FunctionProblem p = sphere(c);
  const Bounds b = wide(12);
  PsoOptions o;
  o.seed = 11;
  const OptimizationResult r = pso_minimize(p, b, o);
  CHECK(r.final_cost < 1e-4);
  CHECK(b.contains(r.solution));
  for (std::size_t k = 1; k < r.cost_history.size(); ++k) {
    CHECK(r.cost_history[k] <= r.cost_history[k - 1]);
  }
  CHECK(pso_minimize(p, b, o).solution == r.solution);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) {
    CHECK(h == 1);
  }
}
