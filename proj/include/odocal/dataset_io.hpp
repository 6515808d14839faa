#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "odocal/sensor_sim.hpp"

namespace odocal {

inline constexpr int kDatasetSchemaVersion = 1;

/// Malformed or unreadable dataset, config, or trace file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, so every double round-trips exactly.
std::string format_double(double value);
/// Strict full-token parse; throws FormatError.
double parse_double(std::string_view text);

/// Throws FormatError unless `j` is an object whose keys are all in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where);

nlohmann::json params_to_json(const KinematicParams& params);
/// Expects {"wheel_x": [4], "wheel_y": [4], "wheel_radius": [4]}; rejects
/// unknown keys and invalid geometry.
KinematicParams params_from_json(const nlohmann::json& j);

nlohmann::json disturbance_to_json(const DisturbanceConfig& d);
/// Missing keys keep `base` values; unknown keys are rejected.
DisturbanceConfig disturbance_from_json(const nlohmann::json& j,
                                        const DisturbanceConfig& base = {});

nlohmann::json spec_to_json(const TrajectorySpec& spec);
TrajectorySpec spec_from_json(const nlohmann::json& j);

/// Writes manifest.json plus four CSV files per recording into `dir`
/// (created if missing). Existing files of the same names are replaced.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Throws FormatError on a missing manifest, schema mismatch, or malformed
/// CSV.
Dataset read_dataset(const std::filesystem::path& dir);

/// Identifier used for a recording's files, e.g. "rec_007".
std::string recording_id(std::size_t index);

/// Writes text with LF line endings, replacing the file.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace odocal
