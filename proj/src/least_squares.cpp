#include "odocal/least_squares.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace odocal {

Bounds Bounds::relative(const Eigen::VectorXd& nominal, double fraction) {
  Bounds b;
  b.lower.resize(nominal.size());
  b.upper.resize(nominal.size());
  for (Eigen::Index j = 0; j < nominal.size(); ++j) {
    const double lo = (1.0 - fraction) * nominal[j];
    const double hi = (1.0 + fraction) * nominal[j];
    b.lower[j] = std::min(lo, hi);
    b.upper[j] = std::max(lo, hi);
  }
  return b;
}

bool Bounds::contains(const Eigen::VectorXd& z) const {
  return z.size() == lower.size() && (z.array() >= lower.array()).all() &&
         (z.array() <= upper.array()).all();
}

bool Bounds::strictly_contains(const Eigen::VectorXd& z) const {
  return z.size() == lower.size() && (z.array() > lower.array()).all() &&
         (z.array() < upper.array()).all();
}

Eigen::VectorXd Bounds::clamp(const Eigen::VectorXd& z) const {
  return z.cwiseMax(lower).cwiseMin(upper);
}

void validate(const Bounds& bounds) {
  if (bounds.lower.size() != bounds.upper.size()) {
    throw std::invalid_argument("bound vectors differ in length");
  }
  for (Eigen::Index j = 0; j < bounds.lower.size(); ++j) {
    if (!(bounds.lower[j] < bounds.upper[j])) {
      throw std::invalid_argument("lower bound must be below upper bound at index " +
                                  std::to_string(j));
    }
  }
}

double LeastSquaresProblem::cost(const Eigen::VectorXd& z) const {
  Eigen::VectorXd r;
  residuals(z, r);
  return r.squaredNorm();
}

namespace {

std::string describe(const Eigen::VectorXd& z, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "cost evaluation failed at z = [";
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    os << (j ? ", " : "") << z[j];
  }
  os << "]: " << what;
  return os.str();
}

double fd_step_size(double value, double rel_step) {
  return rel_step * std::max(std::abs(value), 1e-8);
}

}  // namespace

CostEvaluationError::CostEvaluationError(const Eigen::VectorXd& z, const std::string& what)
    : std::runtime_error(describe(z, what)), z_(z) {}

std::string_view to_string(OptimizerStatus status) {
  switch (status) {
    case OptimizerStatus::Converged: return "converged";
    case OptimizerStatus::MaxIterations: return "max_iterations";
    case OptimizerStatus::LineSearchFailed: return "line_search_failed";
    case OptimizerStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) {
            error = std::current_exception();
          }
          failed = true;
        }
      }
    });
  }
  pool.clear();
  if (error) {
    std::rethrow_exception(error);
  }
}

Eigen::MatrixXd forward_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& r0, const Bounds* bounds,
                                 double rel_step) {
  const Eigen::Index n = problem.parameter_count();
  Eigen::MatrixXd jac(r0.size(), n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t col) {
    const auto j = static_cast<Eigen::Index>(col);
    double h = fd_step_size(z[j], rel_step);
    if (bounds != nullptr && z[j] + h > bounds->upper[j]) {
      h = -h;
    }
    Eigen::VectorXd zp = z;
    zp[j] += h;
    Eigen::VectorXd rp;
    problem.residuals(zp, rp);
    jac.col(j) = (rp - r0) / (zp[j] - z[j]);
  });
  return jac;
}

Eigen::MatrixXd central_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& z,
                                 double rel_step) {
  const Eigen::Index n = problem.parameter_count();
  Eigen::MatrixXd jac(problem.residual_count(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = fd_step_size(z[j], rel_step);
    Eigen::VectorXd zp = z;
    Eigen::VectorXd zm = z;
    zp[j] += h;
    zm[j] -= h;
    Eigen::VectorXd rp;
    Eigen::VectorXd rm;
    problem.residuals(zp, rp);
    problem.residuals(zm, rm);
    jac.col(j) = (rp - rm) / (zp[j] - zm[j]);
  }
  return jac;
}

}  // namespace odocal
