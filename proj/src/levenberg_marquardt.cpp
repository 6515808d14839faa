#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "odocal/least_squares.hpp"

namespace odocal {

Linearization linearize(const LeastSquaresProblem& problem, const Eigen::VectorXd& z,
                        const Bounds& bounds, double fd_step) {
  Linearization lin;
  lin.z = z;
  problem.residuals(z, lin.residuals);
  lin.cost = lin.residuals.squaredNorm();
  lin.jacobian = forward_jacobian(problem, z, lin.residuals, &bounds, fd_step);
  return lin;
}

namespace {

// Returns false when the damped normal matrix cannot be factorized.
bool solve_damped(const Linearization& lin, double damping, Eigen::VectorXd& step) {
  const Eigen::MatrixXd jtj = lin.jacobian.transpose() * lin.jacobian;
  const Eigen::VectorXd jtr = lin.jacobian.transpose() * lin.residuals;
  Eigen::VectorXd diag = jtj.diagonal();
  // A parameter with no influence would leave a zero on the diagonal.
  const double floor = std::max(diag.maxCoeff(), 1.0) * 1e-15;
  diag = diag.cwiseMax(floor);
  Eigen::MatrixXd lhs = jtj;
  lhs.diagonal() += damping * diag;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    return false;
  }
  step = ldlt.solve(-jtr);
  return step.allFinite();
}

}  // namespace

Eigen::VectorXd lm_direction(const Linearization& lin, double damping) {
  Eigen::VectorXd step;
  if (!solve_damped(lin, damping, step)) {
    return Eigen::VectorXd::Zero(lin.z.size());
  }
  return step;
}

LmStep lm_step(const LeastSquaresProblem& problem, const Bounds& bounds,
               const Linearization& lin, double damping) {
  LmStep out;
  out.z = lin.z;
  out.cost = lin.cost;
  out.damping = damping * 2.0;
  Eigen::VectorXd step;
  if (!solve_damped(lin, damping, step)) {
    return out;
  }
  const Eigen::VectorXd trial = bounds.clamp(lin.z + step);
  if (trial == lin.z) {
    return out;
  }
  const double trial_cost = problem.cost(trial);
  if (std::isfinite(trial_cost) && trial_cost < lin.cost) {
    out.z = trial;
    out.cost = trial_cost;
    out.damping = damping * 0.5;
    out.accepted = true;
  }
  return out;
}

LmStep lm_step(const LeastSquaresProblem& problem, const Bounds& bounds,
               const Eigen::VectorXd& z, double damping, double fd_step) {
  return lm_step(problem, bounds, linearize(problem, z, bounds, fd_step), damping);
}

OptimizationResult levenberg_marquardt(const LeastSquaresProblem& problem,
                                       const Eigen::VectorXd& z0, const Bounds& bounds,
                                       const LmOptions& options) {
  validate(bounds);
  if (!bounds.contains(z0)) {
    throw std::invalid_argument("levenberg_marquardt: z0 outside bounds");
  }
  const long n = static_cast<long>(z0.size());

  OptimizationResult result;
  Linearization lin = linearize(problem, z0, bounds, options.fd_step);
  result.evaluations = 1 + n;
  result.initial_cost = lin.cost;
  result.iterates.push_back(z0);
  double damping = options.initial_damping;
  result.status = OptimizerStatus::MaxIterations;

  while (result.iterations < options.max_iterations) {
    if (lin.cost <= options.cost_floor) {
      result.status = OptimizerStatus::Converged;
      break;
    }
    LmStep step;
    int rejections = 0;
    do {
      step = lm_step(problem, bounds, lin, damping);
      ++result.evaluations;
      damping = step.damping;
    } while (!step.accepted && ++rejections <= options.max_rejections);
    if (!step.accepted) {
      // No damping produces a decrease: a (local) minimum at working precision.
      result.status = OptimizerStatus::Converged;
      break;
    }
    ++result.iterations;
    const double reduction = (lin.cost - step.cost) / lin.cost;
    const double step_norm = (step.z - lin.z).norm();
    const double z_norm = std::max(lin.z.norm(), std::numeric_limits<double>::min());
    result.cost_history.push_back(step.cost);
    result.iterates.push_back(step.z);
    if (reduction < options.relative_cost_tolerance ||
        step_norm < options.step_tolerance * z_norm || step.cost <= options.cost_floor) {
      lin.z = step.z;
      lin.cost = step.cost;
      result.status = OptimizerStatus::Converged;
      break;
    }
    lin = linearize(problem, step.z, bounds, options.fd_step);
    result.evaluations += 1 + n;
  }
  result.solution = lin.z;
  result.final_cost = lin.cost;
  return result;
}

}  // namespace odocal
