#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "odocal/calibration.hpp"
#include "odocal/config.hpp"
#include "odocal/trace_io.hpp"

namespace odocal {

/// Simulates the configured dataset (six kinds times `repetitions` by
/// default) and writes it to `out`. Commands are generated under
/// `config.params`, the robot's believed geometry.
Dataset cmd_simulate(const RunConfig& config, const std::filesystem::path& out);

/// Calibrates the dataset in `dataset_dir` starting from `config.params` and
/// writes report.json, report.txt and params.json to `out`. No file content
/// depends on wall-clock time.
CalibrationReport cmd_calibrate(const std::filesystem::path& dataset_dir,
                                const RunConfig& config, const std::filesystem::path& out);

/// Runs the configured filter on every recording with `config.params` and
/// writes one trace per recording, named <recording>_<filter>.csv.
std::vector<std::filesystem::path> cmd_estimate(const std::filesystem::path& dataset_dir,
                                                const RunConfig& config,
                                                const std::filesystem::path& out);

/// Compares traces (named by file stem) and writes summary.csv, summary.txt
/// and path_<name>.csv to `out`.
Comparison cmd_compare(const std::vector<std::filesystem::path>& traces,
                       const std::filesystem::path& out);

/// JSON form of a calibration report without the wall time.
nlohmann::json report_to_json(const CalibrationReport& report);

}  // namespace odocal
