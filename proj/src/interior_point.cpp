#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "odocal/least_squares.hpp"

namespace odocal {

namespace {

// The objective seen in box-normalized coordinates u = (z - LB) / (UB - LB).
class NormalizedProblem {
 public:
  NormalizedProblem(const LeastSquaresProblem& problem, const Bounds& bounds)
      : problem_(problem), lower_(bounds.lower), range_(bounds.range()) {}

  Eigen::VectorXd to_z(const Eigen::VectorXd& u) const {
    return lower_ + range_.cwiseProduct(u);
  }

  double cost(const Eigen::VectorXd& u, long& evaluations) const {
    ++evaluations;
    return problem_.cost(to_z(u));
  }

  // Residuals and Jacobian with respect to u.
  void linearize(const Eigen::VectorXd& u, double fd_step, Eigen::VectorXd& r,
                 Eigen::MatrixXd& jac, long& evaluations) const {
    const Eigen::VectorXd z = to_z(u);
    problem_.residuals(z, r);
    jac = forward_jacobian(problem_, z, r, nullptr, fd_step) * range_.asDiagonal();
    evaluations += 1 + z.size();
  }

 private:
  const LeastSquaresProblem& problem_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd range_;
};

double barrier(const Eigen::VectorXd& u) {
  return -(u.array().log() + (1.0 - u.array()).log()).sum();
}

}  // namespace

OptimizationResult interior_point_minimize(const LeastSquaresProblem& problem,
                                           const Eigen::VectorXd& z0, const Bounds& bounds,
                                           const InteriorPointOptions& options) {
  validate(bounds);
  if (!bounds.contains(z0)) {
    throw std::invalid_argument("interior_point_minimize: z0 outside bounds");
  }
  const NormalizedProblem np(problem, bounds);
  const Eigen::Index n = z0.size();

  Eigen::VectorXd u = (z0 - bounds.lower).cwiseQuotient(bounds.range());
  u = u.cwiseMax(1e-3).cwiseMin(1.0 - 1e-3);

  OptimizationResult result;
  result.initial_cost = problem.cost(z0);
  result.evaluations = 1;
  double cost = np.cost(u, result.evaluations);
  result.iterates.push_back(np.to_z(u));

  double mu = options.initial_mu > 0.0
                  ? options.initial_mu
                  : std::max(0.1 * cost / static_cast<double>(n), 10.0 * options.final_mu);
  result.status = OptimizerStatus::Converged;

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  while (true) {
    bool line_search_failed = false;
    for (int inner = 0; inner < options.max_inner_iterations; ++inner) {
      np.linearize(u, options.fd_step, r, jac, result.evaluations);
      cost = r.squaredNorm();
      const double phi = cost + mu * barrier(u);

      const Eigen::ArrayXd inv_lo = u.array().inverse();
      const Eigen::ArrayXd inv_hi = (1.0 - u.array()).inverse();
      const Eigen::VectorXd grad =
          2.0 * jac.transpose() * r - (mu * (inv_lo - inv_hi)).matrix();
      Eigen::MatrixXd hess = 2.0 * jac.transpose() * jac;
      hess.diagonal() += (mu * (inv_lo.square() + inv_hi.square())).matrix();

      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd dir = ldlt.solve(-grad);
      double slope = grad.dot(dir);
      if (ldlt.info() != Eigen::Success || !dir.allFinite() || !(slope < 0.0)) {
        dir = -grad;
        slope = grad.dot(dir);
      }
      // Newton decrement test.
      if (-slope <= options.inner_tolerance * std::max(phi, std::numeric_limits<double>::min())) {
        break;
      }

      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (dir[j] < 0.0) {
          alpha = std::min(alpha, options.boundary_fraction * u[j] / -dir[j]);
        } else if (dir[j] > 0.0) {
          alpha = std::min(alpha, options.boundary_fraction * (1.0 - u[j]) / dir[j]);
        }
      }

      bool accepted = false;
      for (int bt = 0; bt < options.max_backtracks; ++bt, alpha *= 0.5) {
        const Eigen::VectorXd trial = u + alpha * dir;
        if ((trial.array() <= 0.0).any() || (trial.array() >= 1.0).any()) {
          continue;
        }
        const double trial_cost = np.cost(trial, result.evaluations);
        const double trial_phi = trial_cost + mu * barrier(trial);
        if (std::isfinite(trial_phi) && trial_phi <= phi + options.armijo * alpha * slope) {
          u = trial;
          cost = trial_cost;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // At working precision no decrease is representable when the
        // decrement is already tiny relative to phi.
        line_search_failed = -slope > 1e-8 * std::max(phi, std::numeric_limits<double>::min());
        break;
      }
      ++result.iterations;
      result.iterates.push_back(np.to_z(u));
      result.cost_history.push_back(cost);
    }
    if (mu < options.final_mu) {
      if (line_search_failed) {
        result.status = OptimizerStatus::LineSearchFailed;
      }
      break;
    }
    mu *= options.mu_reduction;
  }

  result.solution = np.to_z(u);
  result.final_cost = problem.cost(result.solution);
  ++result.evaluations;
  return result;
}

}  // namespace odocal
