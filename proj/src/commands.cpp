#include "odocal/commands.hpp"

#include <cstdio>
#include <map>

#include "odocal/dataset_io.hpp"
#include "odocal/tables.hpp"

namespace odocal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw FormatError("cannot create '" + dir.string() + "': " + ec.message());
  }
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw FormatError("dataset directory not found: " + dir.string());
  }
  return read_dataset(dir);
}

json table_to_json(const ErrorTable& table) {
  json rows = json::array();
  for (const ErrorRow& r : table) {
    rows.push_back({{"kind", std::string(to_string(r.kind))},
                    {"e_x_max", r.x_max},
                    {"e_x_mean", r.x_mean},
                    {"e_y_max", r.y_max},
                    {"e_y_mean", r.y_mean},
                    {"e_theta_max", r.theta_max},
                    {"e_theta_mean", r.theta_mean}});
  }
  return rows;
}

std::vector<double> as_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

json report_to_json(const CalibrationReport& report) {
  return json{{"method", std::string(to_string(report.method))},
              {"status", std::string(to_string(report.status))},
              {"params", params_to_json(from_vector(report.solution))},
              {"initial_params", params_to_json(from_vector(report.initial))},
              {"bounds", {{"lower", as_std(report.bounds.lower)}, {"upper", as_std(report.bounds.upper)}}},
              {"initial_cost", report.initial_cost},
              {"final_cost", report.final_cost},
              {"iterations", report.iterations},
              {"evaluations", report.evaluations},
              {"cost_history", report.cost_history},
              {"errors_before", table_to_json(report.before)},
              {"errors_after", table_to_json(report.after)}};
}

Dataset cmd_simulate(const RunConfig& config, const fs::path& out) {
  DatasetOptions options;
  options.specs = config.simulate.trajectories;
  options.repetitions = config.simulate.repetitions;
  options.command_params = config.params;
  Dataset dataset =
      make_calibration_dataset(config.simulate.true_params, config.effective_disturbance(), options);
  ensure_dir(out);
  write_dataset(dataset, out);
  return dataset;
}

CalibrationReport cmd_calibrate(const fs::path& dataset_dir, const RunConfig& config,
                                const fs::path& out) {
  const Dataset dataset = load_dataset(dataset_dir);
  const Bounds bounds = default_bounds(config.params, config.bound_fraction);
  CalibrationReport report =
      calibrate(dataset, to_vector(config.params), bounds, config.method, config.calibration);
  ensure_dir(out);
  write_text_file(out / "report.json", report_to_json(report).dump(2) + "\n");
  write_text_file(out / "params.json", params_to_json(from_vector(report.solution)).dump(2) + "\n");

  char line[256];
  std::string text;
  text += "method " + std::string(to_string(report.method)) + ", status " +
          std::string(to_string(report.status)) + "\n";
  std::snprintf(line, sizeof line, "cost %.6g -> %.6g, %d iterations, %ld evaluations\n\n",
                report.initial_cost, report.final_cost, report.iterations, report.evaluations);
  text += line;
  text += "parameters\n";
  text += format_params_table({{"initial", from_vector(report.initial)},
                               {std::string(to_string(report.method)),
                                from_vector(report.solution)}});
  text += "\nodometry error before calibration\n";
  text += format_error_table(report.before);
  text += "\nodometry error after calibration\n";
  text += format_error_table(report.after);
  write_text_file(out / "report.txt", text);
  return report;
}

std::vector<fs::path> cmd_estimate(const fs::path& dataset_dir, const RunConfig& config,
                                   const fs::path& out) {
  const Dataset dataset = load_dataset(dataset_dir);
  ensure_dir(out);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < dataset.recordings.size(); ++i) {
    const Recording& rec = dataset.recordings[i];
    const EstimatorRun run = run_estimator(rec, config.params, config.filter, config.filter_noise);
    const std::string id = recording_id(i);
    const Trace trace = make_trace(rec, run, config.filter, config.filter_noise.ukf, id);
    const fs::path path = out / (id + "_" + std::string(to_string(config.filter)) + ".csv");
    write_trace(trace, path);
    written.push_back(path);
  }
  return written;
}

Comparison cmd_compare(const std::vector<fs::path>& traces, const fs::path& out) {
  std::vector<std::pair<std::string, Trace>> named;
  std::map<std::string, int> seen;
  for (const fs::path& p : traces) {
    if (!fs::is_regular_file(p)) {
      throw FormatError("trace file not found: " + p.string());
    }
    std::string name = p.stem().string();
    if (const int n = seen[name]++; n > 0) {
      name += "_" + std::to_string(n + 1);
    }
    named.emplace_back(name, read_trace(p));
  }
  const Comparison c = compare_traces(named);
  ensure_dir(out);
  write_text_file(out / "summary.csv", format_comparison_csv(c));
  write_text_file(out / "summary.txt", format_comparison_text(c));
  for (const auto& [name, trace] : named) {
    write_text_file(out / ("path_" + name + ".csv"), format_path_csv(trace, c.t_begin, c.t_end));
  }
  return c;
}

}  // namespace odocal
