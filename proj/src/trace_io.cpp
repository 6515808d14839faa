#include "odocal/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "odocal/dataset_io.hpp"

namespace odocal {

namespace {

constexpr const char* kMagic = "# odocal-trace v1";
constexpr const char* kColumns =
    "t,x,y,theta,x_true,y_true,theta_true,e_x,e_y,e_theta,nees,var_x,var_y,var_theta";
constexpr std::size_t kColumnCount = 14;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(line);
  while (std::getline(in, token, sep)) {
    out.push_back(token);
  }
  if (!line.empty() && line.back() == sep) {
    out.emplace_back();
  }
  return out;
}

// "key=value" fields of a header comment line.
std::string header_value(const std::string& line, const std::string& key) {
  std::istringstream in(line.substr(1));
  std::string word;
  while (in >> word) {
    if (word.rfind(key + "=", 0) == 0) {
      return word.substr(key.size() + 1);
    }
  }
  throw FormatError("trace header is missing '" + key + "'");
}

double position_error(const TraceRow& r) {
  return std::hypot(r.estimate.x - r.truth.x, r.estimate.y - r.truth.y);
}

// Linear interpolation of the estimate at time t; t must lie inside the rows.
Pose2D interpolate(const std::vector<TraceRow>& rows, double t) {
  auto it = std::lower_bound(rows.begin(), rows.end(), t,
                             [](const TraceRow& r, double value) { return r.t < value; });
  if (it == rows.end()) {
    return rows.back().estimate;
  }
  if (it->t == t || it == rows.begin()) {
    return it->estimate;
  }
  const TraceRow& b = *it;
  const TraceRow& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return {a.estimate.x + s * (b.estimate.x - a.estimate.x),
          a.estimate.y + s * (b.estimate.y - a.estimate.y),
          wrap_angle(a.estimate.theta + s * wrap_angle(b.estimate.theta - a.estimate.theta))};
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Trace make_trace(const Recording& recording, const EstimatorRun& run, FilterKind filter,
                 const UkfConfig& ukf, const std::string& recording_name) {
  if (run.poses.size() != recording.truth.size()) {
    throw std::invalid_argument("estimator run and recording truth differ in length");
  }
  Trace trace;
  trace.filter = filter;
  trace.ukf = ukf;
  trace.recording = recording_name;
  trace.kind = recording.meta.spec.kind;
  trace.rows.reserve(run.poses.size());
  for (std::size_t k = 0; k < run.poses.size(); ++k) {
    TraceRow r;
    r.t = run.t[k];
    r.estimate = run.poses[k];
    r.truth = recording.truth[k];
    r.nees = run.nees[k];
    r.var_x = run.covs[k](0, 0);
    r.var_y = run.covs[k](1, 1);
    r.var_theta = run.covs[k](2, 2);
    trace.rows.push_back(r);
  }
  return trace;
}

std::string format_trace(const Trace& trace) {
  std::string out = kMagic;
  out += "\n# filter=";
  out += to_string(trace.filter);
  if (trace.filter == FilterKind::UKF) {
    out += " alpha=" + format_double(trace.ukf.alpha) + " beta=" + format_double(trace.ukf.beta) +
           " kappa=" + format_double(trace.ukf.kappa);
  }
  out += "\n# recording=" + trace.recording + " kind=" + std::string(to_string(trace.kind));
  out += '\n';
  out += kColumns;
  out += '\n';
  for (const TraceRow& r : trace.rows) {
    const double values[kColumnCount] = {r.t,
                                         r.estimate.x,
                                         r.estimate.y,
                                         r.estimate.theta,
                                         r.truth.x,
                                         r.truth.y,
                                         r.truth.theta,
                                         r.estimate.x - r.truth.x,
                                         r.estimate.y - r.truth.y,
                                         wrap_angle(r.estimate.theta - r.truth.theta),
                                         r.nees,
                                         r.var_x,
                                         r.var_y,
                                         r.var_theta};
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      if (i) {
        out += ',';
      }
      out += format_double(values[i]);
    }
    out += '\n';
  }
  return out;
}

Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw FormatError("not a trace file (missing '" + std::string(kMagic) + "')");
  }
  Trace trace;
  std::string filter_line;
  std::string recording_line;
  if (!std::getline(in, filter_line) || filter_line.rfind("# filter=", 0) != 0 ||
      !std::getline(in, recording_line) || recording_line.rfind("# recording=", 0) != 0) {
    throw FormatError("trace header is incomplete");
  }
  try {
    trace.filter = filter_kind_from_string(header_value(filter_line, "filter"));
    if (trace.filter == FilterKind::UKF) {
      trace.ukf.alpha = parse_double(header_value(filter_line, "alpha"));
      trace.ukf.beta = parse_double(header_value(filter_line, "beta"));
      trace.ukf.kappa = parse_double(header_value(filter_line, "kappa"));
    }
    trace.recording = header_value(recording_line, "recording");
    trace.kind = trajectory_kind_from_string(header_value(recording_line, "kind"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  if (!std::getline(in, line) || line != kColumns) {
    throw FormatError("unexpected trace columns");
  }
  std::size_t line_no = 4;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != kColumnCount) {
      throw FormatError("trace line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " columns");
    }
    double v[kColumnCount];
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      v[i] = parse_double(cells[i]);
    }
    TraceRow r;
    r.t = v[0];
    r.estimate = {v[1], v[2], v[3]};
    r.truth = {v[4], v[5], v[6]};
    r.nees = v[10];
    r.var_x = v[11];
    r.var_y = v[12];
    r.var_theta = v[13];
    if (!trace.rows.empty() && !(r.t > trace.rows.back().t)) {
      throw FormatError("trace timestamps not increasing at line " + std::to_string(line_no));
    }
    trace.rows.push_back(r);
  }
  return trace;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  write_text_file(path, format_trace(trace));
}

Trace read_trace(const std::filesystem::path& path) {
  return parse_trace(read_text_file(path));
}

Comparison compare_traces(const std::vector<std::pair<std::string, Trace>>& traces) {
  if (traces.empty()) {
    throw std::invalid_argument("no traces to compare");
  }
  Comparison c;
  c.t_begin = -std::numeric_limits<double>::infinity();
  c.t_end = std::numeric_limits<double>::infinity();
  for (const auto& [name, trace] : traces) {
    if (trace.rows.empty()) {
      throw std::invalid_argument("trace '" + name + "' is empty");
    }
    c.t_begin = std::max(c.t_begin, trace.rows.front().t);
    c.t_end = std::min(c.t_end, trace.rows.back().t);
  }
  if (c.t_begin > c.t_end) {
    throw std::invalid_argument("trace time ranges do not overlap");
  }
  for (const auto& [name, trace] : traces) {
    if (trace.rows.front().t < c.t_begin || trace.rows.back().t > c.t_end) {
      c.warnings.push_back("trace '" + name + "' spans [" + g6(trace.rows.front().t) + ", " +
                           g6(trace.rows.back().t) + "]; compared on the overlap [" +
                           g6(c.t_begin) + ", " + g6(c.t_end) + "]");
    }
  }
  const auto& first = traces.front().second.rows;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& [name, trace] = traces[i];
    TraceSummary s;
    s.name = name;
    double sum_sq = 0.0;
    for (const TraceRow& r : trace.rows) {
      if (r.t < c.t_begin || r.t > c.t_end) {
        continue;
      }
      const double e = position_error(r);
      ++s.samples;
      sum_sq += e * e;
      s.max_position_error = std::max(s.max_position_error, e);
      s.max_heading_error = std::max(
          s.max_heading_error, std::abs(wrap_angle(r.estimate.theta - r.truth.theta)));
      s.final_position_error = e;
      if (i > 0) {
        const Pose2D ref = interpolate(first, r.t);
        s.max_difference_to_first = std::max(
            s.max_difference_to_first, std::hypot(r.estimate.x - ref.x, r.estimate.y - ref.y));
      }
    }
    if (s.samples == 0) {
      c.warnings.push_back("trace '" + name + "' has no samples inside the overlap");
    } else {
      s.rms_position_error = std::sqrt(sum_sq / static_cast<double>(s.samples));
    }
    c.traces.push_back(s);
  }
  return c;
}

std::string format_comparison_csv(const Comparison& c) {
  std::string out =
      "name,samples,final_position_error,rms_position_error,max_position_error,"
      "max_heading_error,max_difference_to_first\n";
  for (const TraceSummary& s : c.traces) {
    out += s.name + ',' + std::to_string(s.samples) + ',' +
           format_double(s.final_position_error) + ',' + format_double(s.rms_position_error) +
           ',' + format_double(s.max_position_error) + ',' +
           format_double(s.max_heading_error) + ',' + format_double(s.max_difference_to_first) +
           '\n';
  }
  return out;
}

std::string format_comparison_text(const Comparison& c) {
  std::string out = "window [" + g6(c.t_begin) + ", " + g6(c.t_end) + "] s\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %8s %12s %12s %12s %12s %12s\n", "trace", "samples",
                "final[m]", "rms[m]", "max[m]", "max_th[rad]", "diff1[m]");
  out += buf;
  for (const TraceSummary& s : c.traces) {
    std::snprintf(buf, sizeof buf, "%-24s %8zu %12.6g %12.6g %12.6g %12.6g %12.6g\n",
                  s.name.c_str(), s.samples, s.final_position_error, s.rms_position_error,
                  s.max_position_error, s.max_heading_error, s.max_difference_to_first);
    out += buf;
  }
  for (const std::string& w : c.warnings) {
    out += "warning: " + w + '\n';
  }
  return out;
}

std::string format_path_csv(const Trace& trace, double t_begin, double t_end) {
  std::string out = "t,x,y,x_true,y_true\n";
  for (const TraceRow& r : trace.rows) {
    if (r.t < t_begin || r.t > t_end) {
      continue;
    }
    out += format_double(r.t) + ',' + format_double(r.estimate.x) + ',' +
           format_double(r.estimate.y) + ',' + format_double(r.truth.x) + ',' +
           format_double(r.truth.y) + '\n';
  }
  return out;
}

}  // namespace odocal
