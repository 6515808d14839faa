#include <algorithm>
#include <numeric>
#include <random>

#include "odocal/least_squares.hpp"

namespace odocal {

namespace {

void evaluate_all(const LeastSquaresProblem& problem, const std::vector<Eigen::VectorXd>& pop,
                  std::vector<double>& costs) {
  costs.resize(pop.size());
  parallel_for(pop.size(), [&](std::size_t i) { costs[i] = problem.cost(pop[i]); });
}

}  // namespace

OptimizationResult ga_minimize(const LeastSquaresProblem& problem, const Bounds& bounds,
                               const GaOptions& options,
                               const std::optional<Eigen::VectorXd>& seed_point) {
  validate(bounds);
  if (options.population < 2 || options.generations < 0 || options.tournament_size < 1 ||
      options.elites < 0 || options.elites >= options.population) {
    throw std::invalid_argument("ga_minimize: invalid population settings");
  }
  const Eigen::Index n = bounds.size();
  const Eigen::VectorXd range = bounds.range();
  const auto pop_size = static_cast<std::size_t>(options.population);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);

  std::vector<Eigen::VectorXd> pop(pop_size, Eigen::VectorXd(n));
  for (auto& ind : pop) {
    for (Eigen::Index j = 0; j < n; ++j) {
      ind[j] = bounds.lower[j] + unit(rng) * range[j];
    }
  }
  if (seed_point) {
    pop[0] = bounds.clamp(*seed_point);
  }
  std::vector<double> costs;
  evaluate_all(problem, pop, costs);

  OptimizationResult result;
  result.evaluations = static_cast<long>(pop_size);
  auto best_it = std::min_element(costs.begin(), costs.end());
  result.solution = pop[static_cast<std::size_t>(best_it - costs.begin())];
  result.final_cost = *best_it;
  result.initial_cost = seed_point ? costs[0] : result.final_cost;
  result.cost_history.push_back(result.final_cost);

  std::vector<std::size_t> order(pop_size);
  for (int gen = 0; gen < options.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

    auto tournament = [&] {
      std::size_t winner = pick(rng);
      for (int k = 1; k < options.tournament_size; ++k) {
        const std::size_t challenger = pick(rng);
        if (costs[challenger] < costs[winner]) {
          winner = challenger;
        }
      }
      return winner;
    };

    std::vector<Eigen::VectorXd> next;
    next.reserve(pop_size);
    for (int e = 0; e < options.elites; ++e) {
      next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    }
    while (next.size() < pop_size) {
      const Eigen::VectorXd& a = pop[tournament()];
      const Eigen::VectorXd& b = pop[tournament()];
      Eigen::VectorXd child(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double lo = std::min(a[j], b[j]);
        const double hi = std::max(a[j], b[j]);
        const double spread = options.blx_alpha * (hi - lo);
        child[j] = lo - spread + unit(rng) * (hi - lo + 2.0 * spread);
        if (unit(rng) < options.mutation_probability) {
          child[j] += options.mutation_sigma * range[j] * gauss(rng);
        }
      }
      next.push_back(bounds.clamp(child));
    }

    // Elites keep their known costs; only offspring are evaluated.
    std::vector<double> next_costs(pop_size);
    for (int e = 0; e < options.elites; ++e) {
      next_costs[static_cast<std::size_t>(e)] = costs[order[static_cast<std::size_t>(e)]];
    }
    const auto elites = static_cast<std::size_t>(options.elites);
    parallel_for(pop_size - elites, [&](std::size_t i) {
      next_costs[elites + i] = problem.cost(next[elites + i]);
    });
    result.evaluations += static_cast<long>(pop_size - elites);
    pop = std::move(next);
    costs = std::move(next_costs);

    for (std::size_t i = 0; i < pop_size; ++i) {
      if (costs[i] < result.final_cost) {
        result.final_cost = costs[i];
        result.solution = pop[i];
      }
    }
    ++result.iterations;
    result.cost_history.push_back(result.final_cost);
  }
  result.status = OptimizerStatus::BudgetExhausted;
  return result;
}

}  // namespace odocal
