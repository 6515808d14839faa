// Command-line front end: simulate -> calibrate -> estimate -> compare.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odocal/commands.hpp"
#include "odocal/dataset_io.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Simulator and optimizer seed");
  cmd->add_option("--out", o.out, "Output directory (overrides ODOCAL_OUT_DIR and the config)");
}

odocal::RunConfig load(const CommonOptions& o) {
  odocal::RunConfig config = o.config.empty() ? odocal::RunConfig{} : odocal::load_run_config(o.config);
  if (o.seed) {
    odocal::apply_seed(config, *o.seed);
  }
  return config;
}

// Messages stay on one line so the error is machine-parseable.
std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') {
      c = ' ';
    }
  }
  return s;
}

int fail(const char* code, const std::string& message) {
  std::cerr << "error code=" << code << " message=" << one_line(message) << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Odometry calibration and pose estimation for a four-wheel steered robot"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "Simulate a calibration dataset");
  add_common(sim, sim_opts);

  CommonOptions cal_opts;
  std::string cal_dataset;
  std::string cal_method;
  std::string cal_params;
  auto* cal = app.add_subcommand("calibrate", "Fit the kinematic parameters to a dataset");
  add_common(cal, cal_opts);
  cal->add_option("--dataset", cal_dataset, "Dataset directory")->required();
  cal->add_option("--method", cal_method, "lm, interior_point, ga or pso");
  cal->add_option("--params", cal_params, "Starting parameters: 'nominal' or a JSON file");

  CommonOptions est_opts;
  std::string est_dataset;
  std::string est_filter;
  std::string est_params;
  auto* est = app.add_subcommand("estimate", "Run a pose estimator over every recording");
  add_common(est, est_opts);
  est->add_option("--dataset", est_dataset, "Dataset directory")->required();
  est->add_option("--filter", est_filter, "odom, ekf or ukf");
  est->add_option("--params", est_params, "Robot parameters: 'nominal' or a JSON file");

  CommonOptions cmp_opts;
  std::vector<std::string> cmp_traces;
  auto* cmp = app.add_subcommand("compare", "Compare pose traces against ground truth");
  add_common(cmp, cmp_opts);
  cmp->add_option("traces", cmp_traces, "Trace CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (sim->parsed()) {
      const odocal::RunConfig config = load(sim_opts);
      const auto out = odocal::resolve_output_dir(config, sim_opts.out);
      const auto dataset = odocal::cmd_simulate(config, out);
      std::cout << "wrote " << dataset.recordings.size() << " recordings to " << out.string()
                << '\n';
    } else if (cal->parsed()) {
      odocal::RunConfig config = load(cal_opts);
      if (!cal_method.empty()) {
        config.method = odocal::calibration_method_from_string(cal_method);
      }
      if (!cal_params.empty()) {
        config.params = odocal::load_params(cal_params);
      }
      const auto out = odocal::resolve_output_dir(config, cal_opts.out);
      const auto report = odocal::cmd_calibrate(cal_dataset, config, out);
      std::printf("%s: cost %.6g -> %.6g (%s, %.2f s); report in %s\n",
                  std::string(odocal::to_string(report.method)).c_str(), report.initial_cost,
                  report.final_cost, std::string(odocal::to_string(report.status)).c_str(),
                  report.wall_time, out.string().c_str());
    } else if (est->parsed()) {
      odocal::RunConfig config = load(est_opts);
      if (!est_filter.empty()) {
        config.filter = odocal::filter_kind_from_string(est_filter);
      }
      if (!est_params.empty()) {
        config.params = odocal::load_params(est_params);
      }
      const auto out = odocal::resolve_output_dir(config, est_opts.out);
      const auto written = odocal::cmd_estimate(est_dataset, config, out);
      std::cout << "wrote " << written.size() << " traces to " << out.string() << '\n';
    } else if (cmp->parsed()) {
      const odocal::RunConfig config = load(cmp_opts);
      const auto out = odocal::resolve_output_dir(config, cmp_opts.out);
      std::vector<std::filesystem::path> paths(cmp_traces.begin(), cmp_traces.end());
      const auto comparison = odocal::cmd_compare(paths, out);
      std::cout << odocal::format_comparison_text(comparison);
    }
  } catch (const odocal::FormatError& e) {
    return fail("format", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
