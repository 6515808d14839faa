#include "odocal/calibration.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace odocal {

Eigen::VectorXd to_vector(const KinematicParams& params) {
  Eigen::VectorXd z(kParamCount);
  for (int i = 0; i < kWheels; ++i) {
    z[i] = params.wheel_x[i];
    z[kWheels + i] = params.wheel_y[i];
    z[2 * kWheels + i] = params.wheel_radius[i];
  }
  return z;
}

KinematicParams from_vector(const Eigen::VectorXd& z) {
  if (z.size() != kParamCount) {
    throw std::invalid_argument("parameter vector must have 12 entries, got " +
                                std::to_string(z.size()));
  }
  KinematicParams p;
  for (int i = 0; i < kWheels; ++i) {
    p.wheel_x[i] = z[i];
    p.wheel_y[i] = z[kWheels + i];
    p.wheel_radius[i] = z[2 * kWheels + i];
  }
  return p;
}

Bounds default_bounds(const KinematicParams& nominal, double fraction) {
  return Bounds::relative(to_vector(nominal), fraction);
}

CalibrationProblem::CalibrationProblem(const Dataset& dataset, KindWeights weights) {
  entries_.reserve(dataset.recordings.size());
  for (const Recording& rec : dataset.recordings) {
    if (rec.truth.size() != rec.frames.size()) {
      throw std::invalid_argument("recording truth is not aligned with its frames");
    }
    double w = 1.0;
    if (auto it = weights.find(rec.meta.spec.kind); it != weights.end()) {
      w = it->second;
    }
    if (!(w >= 0.0)) {
      throw std::invalid_argument("trajectory weights must be non-negative");
    }
    entries_.push_back({PreparedFrames(rec.frames), &rec, std::sqrt(w)});
    residual_count_ += 3 * static_cast<Eigen::Index>(rec.frames.size());
  }
}

TwistSolver CalibrationProblem::make_solver(const Eigen::VectorXd& z) const {
  try {
    return TwistSolver(from_vector(z));
  } catch (const std::invalid_argument& e) {
    throw CostEvaluationError(z, e.what());
  }
}

void CalibrationProblem::residuals(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
  const TwistSolver solver = make_solver(z);
  out.resize(residual_count_);
  std::vector<Pose2D> est;
  Eigen::Index row = 0;
  for (const Entry& e : entries_) {
    const auto& truth = e.recording->truth;
    if (truth.empty()) {
      continue;
    }
    e.frames.integrate(solver, truth.front(), est);
    for (std::size_t k = 0; k < est.size(); ++k) {
      out[row++] = e.weight_sqrt * (est[k].x - truth[k].x);
      out[row++] = e.weight_sqrt * (est[k].y - truth[k].y);
      out[row++] = e.weight_sqrt * wrap_angle(est[k].theta - truth[k].theta);
    }
  }
}

std::vector<double> CalibrationProblem::recording_costs(const Eigen::VectorXd& z) const {
  const TwistSolver solver = make_solver(z);
  std::vector<double> costs;
  costs.reserve(entries_.size());
  std::vector<Pose2D> est;
  for (const Entry& e : entries_) {
    const auto& truth = e.recording->truth;
    double sum = 0.0;
    if (!truth.empty()) {
      e.frames.integrate(solver, truth.front(), est);
      for (std::size_t k = 0; k < est.size(); ++k) {
        const double dx = est[k].x - truth[k].x;
        const double dy = est[k].y - truth[k].y;
        const double dt = wrap_angle(est[k].theta - truth[k].theta);
        sum += dx * dx + dy * dy + dt * dt;
      }
    }
    costs.push_back(e.weight_sqrt * e.weight_sqrt * sum);
  }
  return costs;
}

double CalibrationProblem::cost(const Eigen::VectorXd& z) const {
  double total = 0.0;
  for (double c : recording_costs(z)) {
    total += c;
  }
  return total;
}

double cost(const Eigen::VectorXd& z, const Dataset& dataset) {
  return CalibrationProblem(dataset).cost(z);
}

std::string_view to_string(CalibrationMethod method) {
  switch (method) {
    case CalibrationMethod::LM: return "lm";
    case CalibrationMethod::InteriorPoint: return "interior_point";
    case CalibrationMethod::GA: return "ga";
    case CalibrationMethod::PSO: return "pso";
  }
  return "unknown";
}

CalibrationMethod calibration_method_from_string(std::string_view name) {
  for (CalibrationMethod m : {CalibrationMethod::LM, CalibrationMethod::InteriorPoint,
                              CalibrationMethod::GA, CalibrationMethod::PSO}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw std::invalid_argument("unknown calibration method '" + std::string(name) + "'");
}

ErrorTable error_table(const Dataset& dataset, const KinematicParams& params) {
  const TwistSolver solver(params);
  ErrorTable table;
  std::vector<Pose2D> est;
  for (TrajectoryKind kind : kAllTrajectoryKinds) {
    ErrorRow row;
    row.kind = kind;
    std::size_t samples = 0;
    double sx = 0.0;
    double sy = 0.0;
    double st = 0.0;
    for (const Recording* rec : dataset.of_kind(kind)) {
      if (rec->truth.empty()) {
        continue;
      }
      PreparedFrames(rec->frames).integrate(solver, rec->truth.front(), est);
      for (std::size_t k = 0; k < est.size(); ++k) {
        const double ex = std::abs(est[k].x - rec->truth[k].x);
        const double ey = std::abs(est[k].y - rec->truth[k].y);
        const double et = std::abs(wrap_angle(est[k].theta - rec->truth[k].theta));
        row.x_max = std::max(row.x_max, ex);
        row.y_max = std::max(row.y_max, ey);
        row.theta_max = std::max(row.theta_max, et);
        sx += ex;
        sy += ey;
        st += et;
        ++samples;
      }
    }
    if (samples == 0) {
      continue;
    }
    const auto n = static_cast<double>(samples);
    row.x_mean = sx / n;
    row.y_mean = sy / n;
    row.theta_mean = st / n;
    table.push_back(row);
  }
  return table;
}

CalibrationReport calibrate(const Dataset& dataset, const Eigen::VectorXd& z0,
                            const Bounds& bounds, CalibrationMethod method,
                            const CalibrationOptions& options) {
  validate(bounds);
  if (z0.size() != kParamCount || bounds.size() != kParamCount) {
    throw std::invalid_argument("calibrate: parameter vector and bounds must have 12 entries");
  }
  if (!bounds.contains(z0)) {
    throw std::invalid_argument("calibrate: z0 lies outside the bounds");
  }
  const auto start = std::chrono::steady_clock::now();
  const CalibrationProblem problem(dataset, options.kind_weights);

  OptimizationResult opt;
  switch (method) {
    case CalibrationMethod::LM:
      opt = levenberg_marquardt(problem, z0, bounds, options.lm);
      break;
    case CalibrationMethod::InteriorPoint:
      opt = interior_point_minimize(problem, z0, bounds, options.interior_point);
      break;
    case CalibrationMethod::GA:
      opt = ga_minimize(problem, bounds, options.ga, z0);
      break;
    case CalibrationMethod::PSO:
      opt = pso_minimize(problem, bounds, options.pso, z0);
      break;
  }

  CalibrationReport report;
  report.method = method;
  report.initial = z0;
  report.bounds = bounds;
  report.initial_cost = problem.cost(z0);
  report.solution = opt.solution;
  report.final_cost = opt.final_cost;
  if (!(report.final_cost <= report.initial_cost)) {
    report.solution = z0;
    report.final_cost = report.initial_cost;
  }
  report.iterations = opt.iterations;
  report.evaluations = opt.evaluations;
  report.status = opt.status;
  report.cost_history = std::move(opt.cost_history);
  report.before = error_table(dataset, from_vector(z0));
  report.after = error_table(dataset, from_vector(report.solution));
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<CalibrationRound> iterative_calibration(const KinematicParams& true_params,
                                                    const DisturbanceConfig& disturbance,
                                                    const Eigen::VectorXd& z0,
                                                    const Bounds& bounds,
                                                    CalibrationMethod method,
                                                    const IterativeOptions& options) {
  std::vector<CalibrationRound> rounds;
  Eigen::VectorXd current = z0;
  for (int round = 0; round < options.max_rounds; ++round) {
    DatasetOptions ds_options = options.dataset;
    ds_options.command_params = from_vector(current);
    DisturbanceConfig d = disturbance;
    d.rng_seed = derive_seed(disturbance.rng_seed, 1000003ULL + static_cast<std::uint64_t>(round));
    const Dataset dataset = make_calibration_dataset(true_params, d, ds_options);
    const CalibrationReport report =
        calibrate(dataset, current, bounds, method, options.calibration);
    if (!rounds.empty() && !(report.final_cost < rounds.back().final_cost)) {
      break;
    }
    rounds.push_back({round, report.initial_cost, report.final_cost, report.solution});
    current = report.solution;
  }
  return rounds;
}

}  // namespace odocal
