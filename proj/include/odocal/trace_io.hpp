#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "odocal/estimators.hpp"
#include "odocal/sensor_sim.hpp"

namespace odocal {

struct TraceRow {
  double t = 0.0;
  Pose2D estimate;
  Pose2D truth;
  double nees = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double var_theta = 0.0;
};

struct Trace {
  FilterKind filter = FilterKind::OdomOnly;
  UkfConfig ukf;  // echoed in the header for UKF traces
  std::string recording;
  TrajectoryKind kind = TrajectoryKind::LineX;
  std::vector<TraceRow> rows;
};

/// Builds a trace from an estimator run over `recording`; errors use the
/// recording truth, which is aligned 1:1 with the frames.
Trace make_trace(const Recording& recording, const EstimatorRun& run, FilterKind filter,
                 const UkfConfig& ukf, const std::string& recording_name);

/// CSV with '#' header lines and columns
/// t,x,y,theta,x_true,y_true,theta_true,e_x,e_y,e_theta,nees,var_x,var_y,var_theta.
std::string format_trace(const Trace& trace);
Trace parse_trace(const std::string& text);
void write_trace(const Trace& trace, const std::filesystem::path& path);
Trace read_trace(const std::filesystem::path& path);

struct TraceSummary {
  std::string name;
  std::size_t samples = 0;        // rows inside the common time window
  double final_position_error = 0.0;
  double rms_position_error = 0.0;
  double max_position_error = 0.0;
  double max_heading_error = 0.0;
  /// Largest position difference from the first trace, interpolated at this
  /// trace's timestamps; zero for the first trace.
  double max_difference_to_first = 0.0;
};

struct Comparison {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<TraceSummary> traces;
  std::vector<std::string> warnings;
};

/// Compares traces over their common time window. Throws
/// std::invalid_argument when the list is empty or the windows do not
/// overlap.
Comparison compare_traces(const std::vector<std::pair<std::string, Trace>>& traces);

std::string format_comparison_csv(const Comparison& comparison);
std::string format_comparison_text(const Comparison& comparison);

/// x-y path data for plotting: t,x,y,x_true,y_true restricted to the window.
std::string format_path_csv(const Trace& trace, double t_begin, double t_end);

}  // namespace odocal
