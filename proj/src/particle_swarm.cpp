#include <algorithm>
#include <random>

#include "odocal/least_squares.hpp"

namespace odocal {

OptimizationResult pso_minimize(const LeastSquaresProblem& problem, const Bounds& bounds,
                                const PsoOptions& options,
                                const std::optional<Eigen::VectorXd>& seed_point) {
  validate(bounds);
  if (options.particles < 1 || options.iterations < 0) {
    throw std::invalid_argument("pso_minimize: invalid swarm settings");
  }
  const Eigen::Index n = bounds.size();
  const Eigen::VectorXd range = bounds.range();
  const Eigen::VectorXd vmax = options.velocity_clamp * range;
  const auto count = static_cast<std::size_t>(options.particles);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::VectorXd> pos(count, Eigen::VectorXd(n));
  std::vector<Eigen::VectorXd> vel(count, Eigen::VectorXd(n));
  for (std::size_t p = 0; p < count; ++p) {
    for (Eigen::Index j = 0; j < n; ++j) {
      pos[p][j] = bounds.lower[j] + unit(rng) * range[j];
      vel[p][j] = (2.0 * unit(rng) - 1.0) * vmax[j];
    }
  }
  if (seed_point) {
    pos[0] = bounds.clamp(*seed_point);
  }

  std::vector<double> costs(count);
  parallel_for(count, [&](std::size_t p) { costs[p] = problem.cost(pos[p]); });

  OptimizationResult result;
  result.evaluations = static_cast<long>(count);
  std::vector<Eigen::VectorXd> personal = pos;
  std::vector<double> personal_cost = costs;
  std::size_t leader = 0;
  for (std::size_t p = 1; p < count; ++p) {
    if (costs[p] < costs[leader]) {
      leader = p;
    }
  }
  result.solution = pos[leader];
  result.final_cost = costs[leader];
  result.initial_cost = seed_point ? costs[0] : result.final_cost;
  result.cost_history.push_back(result.final_cost);

  for (int it = 0; it < options.iterations; ++it) {
    for (std::size_t p = 0; p < count; ++p) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        double v = options.inertia * vel[p][j] +
                   options.cognitive * r1 * (personal[p][j] - pos[p][j]) +
                   options.social * r2 * (result.solution[j] - pos[p][j]);
        v = std::clamp(v, -vmax[j], vmax[j]);
        double x = pos[p][j] + v;
        if (x < bounds.lower[j]) {
          x = bounds.lower[j];
          v = 0.0;
        } else if (x > bounds.upper[j]) {
          x = bounds.upper[j];
          v = 0.0;
        }
        pos[p][j] = x;
        vel[p][j] = v;
      }
    }
    parallel_for(count, [&](std::size_t p) { costs[p] = problem.cost(pos[p]); });
    result.evaluations += static_cast<long>(count);

    for (std::size_t p = 0; p < count; ++p) {
      if (costs[p] < personal_cost[p]) {
        personal_cost[p] = costs[p];
        personal[p] = pos[p];
      }
      if (costs[p] < result.final_cost) {
        result.final_cost = costs[p];
        result.solution = pos[p];
      }
    }
    ++result.iterations;
    result.cost_history.push_back(result.final_cost);
  }
  result.status = OptimizerStatus::BudgetExhausted;
  return result;
}

}  // namespace odocal
