#include "odocal/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace odocal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out) {
    throw FormatError("failed writing '" + path.string() + "'");
  }
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!j.is_object()) {
    throw FormatError(std::string(where) + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool ok = false;
    for (std::string_view key : allowed) {
      ok = ok || item.key() == key;
    }
    if (!ok) {
      throw FormatError("unknown key '" + item.key() + "' in " + std::string(where));
    }
  }
}

namespace {

WheelVector wheel_vector(const json& j, std::string_view name) {
  if (!j.is_array() || j.size() != kWheels) {
    throw FormatError(std::string(name) + " must be an array of 4 numbers");
  }
  WheelVector v;
  for (int i = 0; i < kWheels; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      throw FormatError(std::string(name) + " must be an array of 4 numbers");
    }
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw FormatError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

}  // namespace

json params_to_json(const KinematicParams& p) {
  return json{{"wheel_x", p.wheel_x}, {"wheel_y", p.wheel_y}, {"wheel_radius", p.wheel_radius}};
}

KinematicParams params_from_json(const json& j) {
  reject_unknown_keys(j, {"wheel_x", "wheel_y", "wheel_radius"}, "params");
  if (!j.contains("wheel_x") || !j.contains("wheel_y") || !j.contains("wheel_radius")) {
    throw FormatError("params need wheel_x, wheel_y and wheel_radius");
  }
  KinematicParams p;
  p.wheel_x = wheel_vector(j.at("wheel_x"), "wheel_x");
  p.wheel_y = wheel_vector(j.at("wheel_y"), "wheel_y");
  p.wheel_radius = wheel_vector(j.at("wheel_radius"), "wheel_radius");
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return p;
}

json disturbance_to_json(const DisturbanceConfig& d) {
  return json{{"imu_yaw_sigma", d.imu_yaw_sigma},
              {"imu_yaw_bias", d.imu_yaw_bias},
              {"vo_pos_sigma", d.vo_pos_sigma},
              {"vo_yaw_sigma", d.vo_yaw_sigma},
              {"slip_ratio", d.slip_ratio},
              {"gravity_drift", d.gravity_drift},
              {"twist_sigma_linear", d.twist_sigma_linear},
              {"twist_sigma_angular", d.twist_sigma_angular},
              {"vo_rate", d.vo_rate},
              {"rng_seed", d.rng_seed}};
}

DisturbanceConfig disturbance_from_json(const json& j, const DisturbanceConfig& base) {
  reject_unknown_keys(j,
                      {"imu_yaw_sigma", "imu_yaw_bias", "vo_pos_sigma", "vo_yaw_sigma",
                       "slip_ratio", "gravity_drift", "twist_sigma_linear",
                       "twist_sigma_angular", "vo_rate", "rng_seed"},
                      "disturbance");
  DisturbanceConfig d = base;
  read_if(j, "imu_yaw_sigma", d.imu_yaw_sigma);
  read_if(j, "imu_yaw_bias", d.imu_yaw_bias);
  read_if(j, "vo_pos_sigma", d.vo_pos_sigma);
  read_if(j, "vo_yaw_sigma", d.vo_yaw_sigma);
  if (j.contains("slip_ratio")) {
    const json& s = j.at("slip_ratio");
    if (s.is_number()) {
      d.slip_ratio.fill(s.get<double>());
    } else {
      d.slip_ratio = wheel_vector(s, "slip_ratio");
    }
  }
  read_if(j, "gravity_drift", d.gravity_drift);
  read_if(j, "twist_sigma_linear", d.twist_sigma_linear);
  read_if(j, "twist_sigma_angular", d.twist_sigma_angular);
  read_if(j, "vo_rate", d.vo_rate);
  read_if(j, "rng_seed", d.rng_seed);
  try {
    validate(d);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return d;
}

json spec_to_json(const TrajectorySpec& s) {
  return json{{"kind", std::string(to_string(s.kind))},
              {"length_or_angle", s.length_or_angle},
              {"radius", s.radius},
              {"duration", s.duration},
              {"sample_dt", s.sample_dt}};
}

TrajectorySpec spec_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "length_or_angle", "radius", "duration", "sample_dt"},
                      "trajectory");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw FormatError("trajectory needs a string 'kind'");
  }
  TrajectorySpec s;
  try {
    s = TrajectorySpec::defaults(trajectory_kind_from_string(j.at("kind").get<std::string>()));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  read_if(j, "length_or_angle", s.length_or_angle);
  read_if(j, "radius", s.radius);
  read_if(j, "duration", s.duration);
  read_if(j, "sample_dt", s.sample_dt);
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return s;
}

std::string recording_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rec_%03zu", index);
  return buf;
}

namespace {

constexpr const char* kFramesHeader =
    "t,speed1,speed2,speed3,speed4,steer1,steer2,steer3,steer4,"
    "wheel_rate1,wheel_rate2,wheel_rate3,wheel_rate4,"
    "steer_rate1,steer_rate2,steer_rate3,steer_rate4";
constexpr const char* kTruthHeader = "t,x,y,theta";
constexpr const char* kImuHeader = "t,yaw";
constexpr const char* kVoHeader = "t,x,y,theta";

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) {
      out += ',';
    }
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

void append_wheels(std::vector<double>& row, const WheelVector& v) {
  row.insert(row.end(), v.begin(), v.end());
}

void append_row(std::string& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) {
      out += ',';
    }
    out += format_double(values[i]);
  }
  out += '\n';
}

// Parses a CSV with a fixed header into rows of `columns` numbers.
std::vector<std::vector<double>> read_csv(const fs::path& path, std::string_view header,
                                          std::size_t columns) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) {
      end = text.size();
    }
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      continue;
    }
    if (!saw_header) {
      if (line != header) {
        throw FormatError(path.string() + ": unexpected header");
      }
      saw_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(columns);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell =
          line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                             : comma - start);
      try {
        row.push_back(parse_double(cell));
      } catch (const FormatError& e) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    if (row.size() != columns) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (!saw_header) {
    throw FormatError(path.string() + ": missing header");
  }
  return rows;
}

WheelVector slice(const std::vector<double>& row, std::size_t offset) {
  return {row[offset], row[offset + 1], row[offset + 2], row[offset + 3]};
}

}  // namespace

void write_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  json manifest;
  manifest["schema_version"] = kDatasetSchemaVersion;
  manifest["true_params"] = params_to_json(dataset.true_params);
  manifest["command_params"] = params_to_json(dataset.command_params);
  manifest["disturbance"] = disturbance_to_json(dataset.disturbance);
  manifest["master_seed"] = dataset.master_seed;
  manifest["units"] = "SI (m, rad, s)";
  json recs = json::array();

  for (std::size_t i = 0; i < dataset.recordings.size(); ++i) {
    const Recording& rec = dataset.recordings[i];
    const std::string id = recording_id(i);

    std::string frames = std::string(kFramesHeader) + '\n';
    for (const WheelFrame& f : rec.frames) {
      std::vector<double> row{f.t};
      append_wheels(row, f.speed);
      append_wheels(row, f.steer);
      append_wheels(row, f.wheel_rate);
      append_wheels(row, f.steer_rate);
      append_row(frames, row);
    }
    std::string truth = std::string(kTruthHeader) + '\n';
    for (std::size_t k = 0; k < rec.truth.size(); ++k) {
      const Pose2D& p = rec.truth[k];
      append_row(truth, {rec.frames[k].t, p.x, p.y, p.theta});
    }
    std::string imu = std::string(kImuHeader) + '\n';
    for (const TimedYaw& s : rec.imu_yaw) {
      append_row(imu, {s.t, s.yaw});
    }
    std::string vo = std::string(kVoHeader) + '\n';
    for (const TimedPose& s : rec.vo_pose) {
      append_row(vo, {s.t, s.pose.x, s.pose.y, s.pose.theta});
    }

    const json files = {{"frames", id + "_frames.csv"},
                        {"truth", id + "_truth.csv"},
                        {"imu", id + "_imu.csv"},
                        {"vo", id + "_vo.csv"}};
    write_text_file(dir / files["frames"].get<std::string>(), frames);
    write_text_file(dir / files["truth"].get<std::string>(), truth);
    write_text_file(dir / files["imu"].get<std::string>(), imu);
    write_text_file(dir / files["vo"].get<std::string>(), vo);

    recs.push_back({{"id", id},
                    {"kind", std::string(to_string(rec.meta.spec.kind))},
                    {"repetition", rec.meta.repetition},
                    {"seed", rec.meta.seed},
                    {"spec", spec_to_json(rec.meta.spec)},
                    {"files", files}});
  }
  manifest["recordings"] = recs;
  write_text_file(dir / "manifest.json", manifest.dump(2) + '\n');
}

Dataset read_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw FormatError("dataset manifest not found: " + manifest_path.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw FormatError("manifest is not valid JSON: " + std::string(e.what()));
  }
  reject_unknown_keys(manifest,
                      {"schema_version", "true_params", "command_params", "disturbance",
                       "master_seed", "units", "recordings"},
                      "manifest");
  if (!manifest.contains("schema_version") ||
      manifest.at("schema_version") != kDatasetSchemaVersion) {
    throw FormatError("unsupported dataset schema version");
  }
  Dataset ds;
  try {
    ds.true_params = params_from_json(manifest.at("true_params"));
    ds.command_params = params_from_json(manifest.at("command_params"));
    ds.disturbance = disturbance_from_json(manifest.at("disturbance"));
    ds.master_seed = manifest.at("master_seed").get<std::uint64_t>();
    for (const json& r : manifest.at("recordings")) {
      reject_unknown_keys(r, {"id", "kind", "repetition", "seed", "spec", "files"}, "recording");
      Recording rec;
      rec.meta.spec = spec_from_json(r.at("spec"));
      rec.meta.repetition = r.at("repetition").get<int>();
      rec.meta.seed = r.at("seed").get<std::uint64_t>();
      const json& files = r.at("files");
      for (const auto& row : read_csv(dir / files.at("frames").get<std::string>(),
                                      kFramesHeader, 17)) {
        WheelFrame f;
        f.t = row[0];
        f.speed = slice(row, 1);
        f.steer = slice(row, 5);
        f.wheel_rate = slice(row, 9);
        f.steer_rate = slice(row, 13);
        rec.frames.push_back(f);
      }
      const auto truth = read_csv(dir / files.at("truth").get<std::string>(), kTruthHeader, 4);
      if (truth.size() != rec.frames.size()) {
        throw FormatError("truth rows do not match frame rows for " +
                          r.at("id").get<std::string>());
      }
      for (const auto& row : truth) {
        rec.truth.push_back({row[1], row[2], row[3]});
      }
      for (const auto& row : read_csv(dir / files.at("imu").get<std::string>(), kImuHeader, 2)) {
        rec.imu_yaw.push_back({row[0], row[1]});
      }
      for (const auto& row : read_csv(dir / files.at("vo").get<std::string>(), kVoHeader, 4)) {
        rec.vo_pose.push_back({row[0], {row[1], row[2], row[3]}});
      }
      ds.recordings.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw FormatError("malformed manifest: " + std::string(e.what()));
  }
  return ds;
}

}  // namespace odocal
