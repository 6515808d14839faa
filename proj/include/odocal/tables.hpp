#pragma once

#include <string>
#include <utility>
#include <vector>

#include "odocal/calibration.hpp"

namespace odocal {

/// Plain-text per-trajectory error table: one header line, then one row per
/// kind with max/mean |e_x|, |e_y| (m) and |e_theta| (rad), 6 significant
/// digits.
std::string format_error_table(const ErrorTable& table);

/// Inverse of format_error_table. Throws FormatError on malformed input.
ErrorTable parse_error_table(const std::string& text);

/// Parameter table with one labelled row per parameter set and columns
/// x_w1..x_w4, y_w1..y_w4, r_1..r_4 in millimetres.
std::string format_params_table(
    const std::vector<std::pair<std::string, KinematicParams>>& rows);

}  // namespace odocal
