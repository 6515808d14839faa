#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "odocal/kinematics.hpp"
#include "odocal/least_squares.hpp"
#include "odocal/odometry.hpp"
#include "odocal/sensor_sim.hpp"

namespace odocal {

inline constexpr int kParamCount = 12;

/// Parameter vector z ordered (x_w1..x_w4, y_w1..y_w4, r_1..r_4), SI units.
Eigen::VectorXd to_vector(const KinematicParams& params);
/// Throws std::invalid_argument when z does not have 12 entries.
KinematicParams from_vector(const Eigen::VectorXd& z);

/// Nominal +/- 5 % box.
Bounds default_bounds(const KinematicParams& nominal, double fraction = 0.05);

using KindWeights = std::map<TrajectoryKind, double>;

/// Stacked per-step pose errors (x_est - x_abs, y_est - y_abs,
/// wrap(theta_est - theta_abs)) over every recording, each recording
/// dead-reckoned from its own first ground-truth pose. Per-kind weights scale
/// the squared errors (default 1).
class CalibrationProblem final : public LeastSquaresProblem {
 public:
  explicit CalibrationProblem(const Dataset& dataset, KindWeights weights = {});

  Eigen::Index parameter_count() const override { return kParamCount; }
  Eigen::Index residual_count() const override { return residual_count_; }
  void residuals(const Eigen::VectorXd& z, Eigen::VectorXd& out) const override;
  double cost(const Eigen::VectorXd& z) const override;

  /// Cost contribution of each recording, in dataset order.
  std::vector<double> recording_costs(const Eigen::VectorXd& z) const;

 private:
  struct Entry {
    PreparedFrames frames;
    const Recording* recording;
    double weight_sqrt;
  };
  TwistSolver make_solver(const Eigen::VectorXd& z) const;

  std::vector<Entry> entries_;
  Eigen::Index residual_count_ = 0;
};

/// Sum of squared pose errors over all recordings and steps.
double cost(const Eigen::VectorXd& z, const Dataset& dataset);

enum class CalibrationMethod { LM, InteriorPoint, GA, PSO };
std::string_view to_string(CalibrationMethod method);
CalibrationMethod calibration_method_from_string(std::string_view name);

struct CalibrationOptions {
  LmOptions lm;
  InteriorPointOptions interior_point;
  GaOptions ga;
  PsoOptions pso;
  KindWeights kind_weights;
};

/// Per-kind maxima and means of |e_x|, |e_y|, |e_theta| over every step of
/// every recording of that kind.
struct ErrorRow {
  TrajectoryKind kind = TrajectoryKind::LineX;
  double x_max = 0.0;
  double x_mean = 0.0;
  double y_max = 0.0;
  double y_mean = 0.0;
  double theta_max = 0.0;
  double theta_mean = 0.0;
};
using ErrorTable = std::vector<ErrorRow>;

/// Rows appear in canonical kind order, only for kinds present.
ErrorTable error_table(const Dataset& dataset, const KinematicParams& params);

struct CalibrationReport {
  CalibrationMethod method = CalibrationMethod::LM;
  Eigen::VectorXd initial;
  Eigen::VectorXd solution;
  Bounds bounds;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  long evaluations = 0;
  OptimizerStatus status = OptimizerStatus::Converged;
  std::vector<double> cost_history;
  ErrorTable before;
  ErrorTable after;
  double wall_time = 0.0;  // s
};

/// Fits z to the dataset. The solution is always inside the box and never
/// costs more than z0 (z0 is returned when a method ends worse than it
/// started). Stochastic methods include z0 in their initial population.
CalibrationReport calibrate(const Dataset& dataset, const Eigen::VectorXd& z0,
                            const Bounds& bounds, CalibrationMethod method,
                            const CalibrationOptions& options = {});

struct CalibrationRound {
  int round = 0;
  double initial_cost = 0.0;  // cost of the round's starting parameters
  double final_cost = 0.0;
  Eigen::VectorXd solution;
};

struct IterativeOptions {
  int max_rounds = 5;
  DatasetOptions dataset;  // command_params is overwritten every round
  CalibrationOptions calibration;
};

/// Record, fit, re-record with the fitted parameters, and re-fit until a
/// round no longer lowers the final cost. Only improving rounds are
/// returned; the last one holds the parameters to keep.
std::vector<CalibrationRound> iterative_calibration(const KinematicParams& true_params,
                                                    const DisturbanceConfig& disturbance,
                                                    const Eigen::VectorXd& z0,
                                                    const Bounds& bounds,
                                                    CalibrationMethod method,
                                                    const IterativeOptions& options = {});

}  // namespace odocal
