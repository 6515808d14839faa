#include "odocal/tables.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "odocal/dataset_io.hpp"

namespace odocal {

namespace {

constexpr const char* kErrorColumns[] = {"e_x,m[m]", "e_x,a[m]",       "e_y,m[m]",
                                         "e_y,a[m]", "e_theta,m[rad]", "e_theta,a[rad]"};

std::string cell(const char* fmt, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) {
    s.append(width - s.size(), ' ');
  }
  return s;
}

}  // namespace

std::string format_error_table(const ErrorTable& table) {
  std::string out = pad("trajectory", 12);
  for (const char* c : kErrorColumns) {
    out += ' ';
    out += pad(c, 15);
  }
  while (out.back() == ' ') out.pop_back();
  out += '\n';
  for (const ErrorRow& r : table) {
    out += pad(std::string(to_string(r.kind)), 12);
    for (double v : {r.x_max, r.x_mean, r.y_max, r.y_mean, r.theta_max, r.theta_mean}) {
      out += ' ';
      out += pad(cell("%.6g", v), 15);
    }
    while (out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

ErrorTable parse_error_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError("error table is empty");
  }
  {
    std::istringstream header(line);
    std::string word;
    header >> word;
    if (word != "trajectory") {
      throw FormatError("error table header must start with 'trajectory'");
    }
    for (const char* expected : kErrorColumns) {
      if (!(header >> word) || word != expected) {
        throw FormatError("unexpected error table header: " + line);
      }
    }
  }
  ErrorTable table;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::istringstream row(line);
    std::string name;
    row >> name;
    ErrorRow r;
    try {
      r.kind = trajectory_kind_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    double* fields[] = {&r.x_max, &r.x_mean, &r.y_max, &r.y_mean, &r.theta_max, &r.theta_mean};
    for (double* f : fields) {
      std::string token;
      if (!(row >> token)) {
        throw FormatError("short error table row: " + line);
      }
      *f = parse_double(token);
    }
    std::string extra;
    if (row >> extra) {
      throw FormatError("extra columns in error table row: " + line);
    }
    table.push_back(r);
  }
  return table;
}

std::string format_params_table(
    const std::vector<std::pair<std::string, KinematicParams>>& rows) {
  static const char* names[] = {"x_w1", "x_w2", "x_w3", "x_w4", "y_w1", "y_w2",
                                "y_w3", "y_w4", "r_1",  "r_2",  "r_3",  "r_4"};
  std::size_t label_width = 6;
  for (const auto& [label, p] : rows) {
    label_width = std::max(label_width, label.size() + 1);
  }
  std::string out = pad("[mm]", label_width);
  for (const char* n : names) {
    out += pad(n, 10);
  }
  while (out.back() == ' ') out.pop_back();
  out += '\n';
  for (const auto& [label, p] : rows) {
    std::string line = pad(label, label_width);
    for (const WheelVector* v : {&p.wheel_x, &p.wheel_y, &p.wheel_radius}) {
      for (double value : *v) {
        line += pad(cell("%.4f", value * 1000.0), 10);
      }
    }
    while (line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace odocal
