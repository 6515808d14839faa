#include "odocal/config.hpp"

#include <cstdlib>

#include "odocal/dataset_io.hpp"

namespace odocal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void get_to(const json& j, const char* key, T& out) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad value for '") + key + "': " + e.what());
  }
}

KinematicParams params_entry(const json& j, const fs::path& base_dir) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nominal") {
      return KinematicParams::nominal();
    }
    const fs::path path = fs::path(s).is_absolute() ? fs::path(s) : base_dir / s;
    return load_params(path.string());
  }
  return params_from_json(j);
}

// Relative perturbations keyed "x_w1".."x_w4", "y_w1".."y_w4", "r_1".."r_4".
KinematicParams apply_perturbation(KinematicParams p, const json& j) {
  if (!j.is_object()) {
    throw FormatError("perturbation must be an object");
  }
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (!item.value().is_number()) {
      throw FormatError("perturbation '" + key + "' must be a number");
    }
    const double rel = item.value().get<double>();
    WheelVector* target = nullptr;
    char wheel = 0;
    if (key.size() == 4 && key.rfind("x_w", 0) == 0) {
      target = &p.wheel_x;
      wheel = key[3];
    } else if (key.size() == 4 && key.rfind("y_w", 0) == 0) {
      target = &p.wheel_y;
      wheel = key[3];
    } else if (key.size() == 3 && key.rfind("r_", 0) == 0) {
      target = &p.wheel_radius;
      wheel = key[2];
    }
    if (target == nullptr || wheel < '1' || wheel > '4') {
      throw FormatError("unknown perturbation key '" + key + "'");
    }
    (*target)[wheel - '1'] *= 1.0 + rel;
  }
  return p;
}

SimulateConfig parse_simulate(const json& j, const fs::path& base_dir) {
  reject_unknown_keys(j,
                      {"true_params", "perturbation", "trajectories", "repetitions", "wall_mode",
                       "wall_gravity_drift"},
                      "simulate");
  SimulateConfig s;
  if (j.contains("true_params")) {
    s.true_params = params_entry(j.at("true_params"), base_dir);
  }
  if (j.contains("perturbation")) {
    s.true_params = apply_perturbation(s.true_params, j.at("perturbation"));
  }
  if (j.contains("trajectories")) {
    if (!j.at("trajectories").is_array()) {
      throw FormatError("trajectories must be an array");
    }
    for (const json& t : j.at("trajectories")) {
      s.trajectories.push_back(spec_from_json(t));
    }
  }
  get_to(j, "repetitions", s.repetitions);
  get_to(j, "wall_mode", s.wall_mode);
  get_to(j, "wall_gravity_drift", s.wall_gravity_drift);
  if (s.repetitions < 1) {
    throw FormatError("repetitions must be >= 1");
  }
  return s;
}

void parse_lm(const json& j, LmOptions& o) {
  reject_unknown_keys(j,
                      {"max_iterations", "initial_damping", "fd_step",
                       "relative_cost_tolerance", "step_tolerance", "cost_floor",
                       "max_rejections"},
                      "calibration.lm");
  get_to(j, "max_iterations", o.max_iterations);
  get_to(j, "initial_damping", o.initial_damping);
  get_to(j, "fd_step", o.fd_step);
  get_to(j, "relative_cost_tolerance", o.relative_cost_tolerance);
  get_to(j, "step_tolerance", o.step_tolerance);
  get_to(j, "cost_floor", o.cost_floor);
  get_to(j, "max_rejections", o.max_rejections);
}

void parse_ip(const json& j, InteriorPointOptions& o) {
  reject_unknown_keys(j,
                      {"initial_mu", "mu_reduction", "final_mu", "max_inner_iterations",
                       "fd_step", "boundary_fraction", "armijo", "max_backtracks",
                       "inner_tolerance"},
                      "calibration.interior_point");
  get_to(j, "initial_mu", o.initial_mu);
  get_to(j, "mu_reduction", o.mu_reduction);
  get_to(j, "final_mu", o.final_mu);
  get_to(j, "max_inner_iterations", o.max_inner_iterations);
  get_to(j, "fd_step", o.fd_step);
  get_to(j, "boundary_fraction", o.boundary_fraction);
  get_to(j, "armijo", o.armijo);
  get_to(j, "max_backtracks", o.max_backtracks);
  get_to(j, "inner_tolerance", o.inner_tolerance);
  if (!(o.mu_reduction > 0.0 && o.mu_reduction < 1.0)) {
    throw FormatError("interior_point.mu_reduction must lie in (0, 1)");
  }
}

void parse_ga(const json& j, GaOptions& o) {
  reject_unknown_keys(j,
                      {"population", "generations", "seed", "tournament_size", "blx_alpha",
                       "mutation_sigma", "mutation_probability", "elites"},
                      "calibration.ga");
  get_to(j, "population", o.population);
  get_to(j, "generations", o.generations);
  get_to(j, "seed", o.seed);
  get_to(j, "tournament_size", o.tournament_size);
  get_to(j, "blx_alpha", o.blx_alpha);
  get_to(j, "mutation_sigma", o.mutation_sigma);
  get_to(j, "mutation_probability", o.mutation_probability);
  get_to(j, "elites", o.elites);
}

void parse_pso(const json& j, PsoOptions& o) {
  reject_unknown_keys(j,
                      {"particles", "iterations", "seed", "inertia", "cognitive", "social",
                       "velocity_clamp"},
                      "calibration.pso");
  get_to(j, "particles", o.particles);
  get_to(j, "iterations", o.iterations);
  get_to(j, "seed", o.seed);
  get_to(j, "inertia", o.inertia);
  get_to(j, "cognitive", o.cognitive);
  get_to(j, "social", o.social);
  get_to(j, "velocity_clamp", o.velocity_clamp);
}

void parse_calibration(const json& j, RunConfig& c) {
  reject_unknown_keys(j,
                      {"method", "bound_fraction", "kind_weights", "lm", "interior_point", "ga",
                       "pso"},
                      "calibration");
  try {
    if (j.contains("method")) {
      c.method = calibration_method_from_string(j.at("method").get<std::string>());
    }
  } catch (const std::exception& e) {
    throw FormatError(e.what());
  }
  get_to(j, "bound_fraction", c.bound_fraction);
  if (!(c.bound_fraction > 0.0 && c.bound_fraction < 1.0)) {
    throw FormatError("bound_fraction must lie in (0, 1)");
  }
  if (j.contains("kind_weights")) {
    const json& w = j.at("kind_weights");
    if (!w.is_object()) {
      throw FormatError("kind_weights must be an object");
    }
    for (const auto& item : w.items()) {
      try {
        c.calibration.kind_weights[trajectory_kind_from_string(item.key())] =
            item.value().get<double>();
      } catch (const std::exception& e) {
        throw FormatError("kind_weights: " + std::string(e.what()));
      }
    }
  }
  if (j.contains("lm")) parse_lm(j.at("lm"), c.calibration.lm);
  if (j.contains("interior_point")) parse_ip(j.at("interior_point"), c.calibration.interior_point);
  if (j.contains("ga")) parse_ga(j.at("ga"), c.calibration.ga);
  if (j.contains("pso")) parse_pso(j.at("pso"), c.calibration.pso);
}

void parse_filter(const json& j, RunConfig& c) {
  reject_unknown_keys(j,
                      {"kind", "twist_sigma_linear", "twist_sigma_angular", "imu_yaw_sigma",
                       "vo_pos_sigma", "vo_yaw_sigma", "initial_pos_sigma", "initial_yaw_sigma",
                       "use_imu", "use_vo", "ukf"},
                      "filter");
  try {
    if (j.contains("kind")) {
      c.filter = filter_kind_from_string(j.at("kind").get<std::string>());
    }
  } catch (const std::exception& e) {
    throw FormatError(e.what());
  }
  FilterNoise& n = c.filter_noise;
  get_to(j, "twist_sigma_linear", n.twist_sigma_linear);
  get_to(j, "twist_sigma_angular", n.twist_sigma_angular);
  get_to(j, "imu_yaw_sigma", n.imu_yaw_sigma);
  get_to(j, "vo_pos_sigma", n.vo_pos_sigma);
  get_to(j, "vo_yaw_sigma", n.vo_yaw_sigma);
  get_to(j, "initial_pos_sigma", n.initial_pos_sigma);
  get_to(j, "initial_yaw_sigma", n.initial_yaw_sigma);
  get_to(j, "use_imu", n.use_imu);
  get_to(j, "use_vo", n.use_vo);
  if (j.contains("ukf")) {
    const json& u = j.at("ukf");
    reject_unknown_keys(u, {"alpha", "beta", "kappa"}, "filter.ukf");
    get_to(u, "alpha", n.ukf.alpha);
    get_to(u, "beta", n.ukf.beta);
    get_to(u, "kappa", n.ukf.kappa);
  }
  try {
    validate(n.ukf, 3);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

DisturbanceConfig RunConfig::effective_disturbance() const {
  DisturbanceConfig d = disturbance;
  if (simulate.wall_mode && d.gravity_drift == 0.0) {
    d.gravity_drift = simulate.wall_gravity_drift;
  }
  if (!simulate.wall_mode) {
    d.gravity_drift = 0.0;
  }
  return d;
}

KinematicParams load_params(const std::string& source) {
  if (source == "nominal") {
    return KinematicParams::nominal();
  }
  if (!fs::exists(source)) {
    throw FormatError("params file not found: " + source);
  }
  json j;
  try {
    j = json::parse(read_text_file(source));
  } catch (const json::parse_error& e) {
    throw FormatError("params file is not valid JSON: " + std::string(e.what()));
  }
  // Calibration reports nest the parameters under "params".
  if (j.is_object() && j.contains("params") && j.contains("method")) {
    return params_from_json(j.at("params"));
  }
  return params_from_json(j);
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  reject_unknown_keys(j,
                      {"params", "simulate", "disturbance", "calibration", "filter",
                       "output_dir"},
                      "config");
  RunConfig c;
  if (j.contains("params")) {
    c.params = params_entry(j.at("params"), base_dir);
  }
  if (j.contains("simulate")) {
    c.simulate = parse_simulate(j.at("simulate"), base_dir);
  }
  if (j.contains("disturbance")) {
    c.disturbance = disturbance_from_json(j.at("disturbance"), DisturbanceConfig::typical());
  }
  if (j.contains("calibration")) {
    parse_calibration(j.at("calibration"), c);
  }
  if (j.contains("filter")) {
    parse_filter(j.at("filter"), c);
  }
  if (j.contains("output_dir")) {
    c.output_dir = j.at("output_dir").get<std::string>();
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) {
    throw FormatError("config file not found: " + path.string());
  }
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void apply_seed(RunConfig& config, std::uint64_t seed) {
  config.disturbance.rng_seed = seed;
  config.calibration.ga.seed = seed;
  config.calibration.pso.seed = seed;
}

fs::path resolve_output_dir(const RunConfig& config, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) {
    return *flag;
  }
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return env;
  }
  return config.output_dir;
}

}  // namespace odocal
