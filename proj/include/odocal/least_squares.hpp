#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace odocal {

/// Box constraints lower <= z <= upper.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  /// Symmetric relative box around `nominal`, ordered correctly for negative
  /// entries: lower_j = min(0.95 z_j, 1.05 z_j) for fraction 0.05.
  static Bounds relative(const Eigen::VectorXd& nominal, double fraction);

  Eigen::Index size() const { return lower.size(); }
  Eigen::VectorXd range() const { return upper - lower; }
  bool contains(const Eigen::VectorXd& z) const;
  bool strictly_contains(const Eigen::VectorXd& z) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& z) const;
};

/// Throws std::invalid_argument unless lower < upper elementwise.
void validate(const Bounds& bounds);

/// Sum-of-squares objective C(z) = |r(z)|^2.
class LeastSquaresProblem {
 public:
  virtual ~LeastSquaresProblem() = default;
  virtual Eigen::Index parameter_count() const = 0;
  virtual Eigen::Index residual_count() const = 0;
  /// Must be safe to call concurrently.
  virtual void residuals(const Eigen::VectorXd& z, Eigen::VectorXd& out) const = 0;
  virtual double cost(const Eigen::VectorXd& z) const;
};

/// Adapter for residual functions given as callables; used for synthetic
/// benchmark problems.
class FunctionProblem final : public LeastSquaresProblem {
 public:
  using Fn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
  FunctionProblem(Eigen::Index parameters, Eigen::Index residuals, Fn fn)
      : parameters_(parameters), residuals_(residuals), fn_(std::move(fn)) {}
  Eigen::Index parameter_count() const override { return parameters_; }
  Eigen::Index residual_count() const override { return residuals_; }
  void residuals(const Eigen::VectorXd& z, Eigen::VectorXd& out) const override {
    out.resize(residuals_);
    fn_(z, out);
  }

 private:
  Eigen::Index parameters_;
  Eigen::Index residuals_;
  Fn fn_;
};

/// Raised when the objective cannot be evaluated at a parameter vector.
class CostEvaluationError : public std::runtime_error {
 public:
  CostEvaluationError(const Eigen::VectorXd& z, const std::string& what);
  const Eigen::VectorXd& parameters() const { return z_; }

 private:
  Eigen::VectorXd z_;
};

enum class OptimizerStatus { Converged, MaxIterations, LineSearchFailed, BudgetExhausted };
std::string_view to_string(OptimizerStatus status);

struct OptimizationResult {
  Eigen::VectorXd solution;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  long evaluations = 0;
  OptimizerStatus status = OptimizerStatus::Converged;
  std::vector<double> cost_history;  // best cost after each iteration
  std::vector<Eigen::VectorXd> iterates;
};

/// Forward-difference Jacobian. Column j steps by rel_step * max(|z_j|, 1e-8),
/// backwards when the forward point would leave the box.
Eigen::MatrixXd forward_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& r0, const Bounds* bounds,
                                 double rel_step = 1e-6);

/// Central-difference Jacobian, same step rule, ignores bounds.
Eigen::MatrixXd central_jacobian(const LeastSquaresProblem& problem, const Eigen::VectorXd& z,
                                 double rel_step = 1e-6);

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Callers
/// write results into per-index slots so reductions stay ordered.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Levenberg-Marquardt

struct LmOptions {
  int max_iterations = 100;
  double initial_damping = 1e-3;
  double fd_step = 1e-6;
  double relative_cost_tolerance = 1e-14;
  double step_tolerance = 1e-14;  // relative to |z|
  double cost_floor = 1e-24;
  int max_rejections = 40;
};

struct Linearization {
  Eigen::VectorXd z;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;
};

Linearization linearize(const LeastSquaresProblem& problem, const Eigen::VectorXd& z,
                        const Bounds& bounds, double fd_step = 1e-6);

struct LmStep {
  Eigen::VectorXd z;       // unchanged on rejection
  double damping = 0.0;    // halved on accept, doubled on reject
  double cost = 0.0;       // cost at z
  bool accepted = false;
};

/// Solves (J'J + damping diag(J'J)) dz = -J'r, projects z + dz onto the box,
/// and accepts the trial if the cost decreases.
LmStep lm_step(const LeastSquaresProblem& problem, const Bounds& bounds,
               const Linearization& lin, double damping);
LmStep lm_step(const LeastSquaresProblem& problem, const Bounds& bounds,
               const Eigen::VectorXd& z, double damping, double fd_step = 1e-6);

/// Unprojected step lm_step would take for this linearization and damping.
Eigen::VectorXd lm_direction(const Linearization& lin, double damping);

OptimizationResult levenberg_marquardt(const LeastSquaresProblem& problem,
                                       const Eigen::VectorXd& z0, const Bounds& bounds,
                                       const LmOptions& options = {});

// ---------------------------------------------------------------------------
// Log-barrier interior point

struct InteriorPointOptions {
  double initial_mu = -1.0;      // <= 0: scaled from the starting cost
  double mu_reduction = 0.2;
  double final_mu = 1e-9;
  int max_inner_iterations = 50;
  double fd_step = 1e-6;
  double boundary_fraction = 0.995;
  double armijo = 1e-4;
  int max_backtracks = 40;
  double inner_tolerance = 1e-10;
};

/// Minimizes C(z) - mu sum[ln(z - LB) + ln(UB - z)] for a decreasing mu
/// sequence with Gauss-Newton-Hessian Newton steps and backtracking. Works in
/// box-normalized coordinates; every iterate is strictly interior. z0 is
/// pushed off the faces if it starts on one.
OptimizationResult interior_point_minimize(const LeastSquaresProblem& problem,
                                           const Eigen::VectorXd& z0, const Bounds& bounds,
                                           const InteriorPointOptions& options = {});

// ---------------------------------------------------------------------------
// Stochastic searches

struct GaOptions {
  int population = 60;
  int generations = 150;
  std::uint64_t seed = 42;
  int tournament_size = 3;
  double blx_alpha = 0.5;
  double mutation_sigma = 0.02;  // fraction of each range
  double mutation_probability = 0.1;
  int elites = 2;
};

/// Real-coded genetic algorithm: uniform initialization in the box,
/// tournament selection, BLX-alpha crossover, Gaussian mutation, elitism,
/// offspring clipped to the box. Returns the best-ever individual. A given
/// `seed_point` replaces the first random individual.
OptimizationResult ga_minimize(const LeastSquaresProblem& problem, const Bounds& bounds,
                               const GaOptions& options = {},
                               const std::optional<Eigen::VectorXd>& seed_point = std::nullopt);

struct PsoOptions {
  int particles = 40;
  int iterations = 200;
  std::uint64_t seed = 42;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double velocity_clamp = 0.2;  // fraction of each range
};

/// Global-best particle swarm. Positions are clipped to the box and the
/// velocity component is zeroed at a face. A given `seed_point` replaces
/// the first particle's random start.
OptimizationResult pso_minimize(const LeastSquaresProblem& problem, const Bounds& bounds,
                                const PsoOptions& options = {},
                                const std::optional<Eigen::VectorXd>& seed_point = std::nullopt);

}  // namespace odocal
