#include "ovtsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ovtsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Scalar parse_scalar(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const Scalar v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "4.0x1.8x1.5"
KindDims parse_dims(const std::string& key, const std::string& value) {
    KindDims d;
    std::stringstream ss(value);
    std::string part;
    std::vector<Scalar> vals;
    while (std::getline(ss, part, 'x')) vals.push_back(parse_scalar(key, trim(part)));
    if (vals.size() != 3) {
        throw ConfigError("dimension override for " + key + " must be LxWxH");
    }
    d.length = vals[0];
    d.width = vals[1];
    d.height = vals[2];
    return d;
}

std::string format_scalar(Scalar v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

void apply_config_entry(Config& cfg, const std::string& key, const std::string& value) {
    auto& s = cfg.sampler;
    auto& e = cfg.engine;
    auto& d = cfg.detector;
    if (key == "n_vehicles_min") s.n_vehicles_min = parse_int(key, value);
    else if (key == "n_vehicles_max") s.n_vehicles_max = parse_int(key, value);
    else if (key == "speed_min_kmh") s.speed_min_kmh = parse_int(key, value);
    else if (key == "speed_max_kmh") s.speed_max_kmh = parse_int(key, value);
    else if (key == "preceding_speed_margin_kmh") s.preceding_speed_margin_kmh = parse_int(key, value);
    else if (key == "spawn_gap_min_m") s.spawn_gap_min_m = parse_scalar(key, value);
    else if (key == "spawn_gap_max_m") s.spawn_gap_max_m = parse_scalar(key, value);
    else if (key == "min_spawn_clearance_m") s.min_spawn_clearance_m = parse_scalar(key, value);
    else if (key == "placement_max_retries") s.placement_max_retries = parse_int(key, value);
    else if (key == "mv_choices_kmh") {
        s.mv_choices_kmh.clear();
        for (const auto& item : split_list(value)) s.mv_choices_kmh.push_back(parse_int(key, item));
        if (s.mv_choices_kmh.empty()) throw ConfigError("mv_choices_kmh must not be empty");
    } else if (key == "presets") {
        s.preset_whitelist = split_list(value);
    } else if (key.rfind("dims_", 0) == 0) {
        const VehicleKind kind = vehicle_kind_from_string(key.substr(5));
        s.dims[static_cast<int>(kind)] = parse_dims(key, value);
    }
    else if (key == "dt_s") e.dt = parse_scalar(key, value);
    else if (key == "duration_s") e.duration = parse_scalar(key, value);
    else if (key == "trigger_gap_m") e.trigger_gap_m = parse_scalar(key, value);
    else if (key == "return_margin_m") e.return_margin_m = parse_scalar(key, value);
    else if (key == "return_clearance_m") e.return_clearance_m = parse_scalar(key, value);
    else if (key == "lane_change_ref_speed_kmh") e.lane_change_ref_speed_kmh = parse_scalar(key, value);
    else if (key == "lane_change_scale_s") e.lane_change_scale_s = parse_scalar(key, value);
    else if (key == "lane_change_min_s") e.lane_change_min_s = parse_scalar(key, value);
    else if (key == "lane_change_max_s") e.lane_change_max_s = parse_scalar(key, value);
    else if (key == "accel_max_mps2") e.accel_max_mps2 = parse_scalar(key, value);
    else if (key == "brake_comfort_mps2") e.brake_comfort_mps2 = parse_scalar(key, value);
    else if (key == "brake_max_mps2") e.brake_max_mps2 = parse_scalar(key, value);
    else if (key == "idm_headway_s") e.idm_headway_s = parse_scalar(key, value);
    else if (key == "idm_min_gap_m") e.idm_min_gap_m = parse_scalar(key, value);
    else if (key == "npc_accel_max_mps2") e.npc_accel_max_mps2 = parse_scalar(key, value);
    else if (key == "y_pert_max_m") e.y_pert_max_m = parse_scalar(key, value);
    else if (key == "pert_interval_min_frames") e.pert_interval_min_frames = parse_int(key, value);
    else if (key == "pert_interval_max_frames") e.pert_interval_max_frames = parse_int(key, value);
    else if (key == "pert_decay_tau_s") e.pert_decay_tau_s = parse_scalar(key, value);
    else if (key == "detection_range_m") e.detection_range_m = parse_scalar(key, value);
    else if (key == "cloud_visibility_factor") e.cloud_visibility_factor = parse_scalar(key, value);
    else if (key == "cloud_threshold_pct") e.cloud_threshold_pct = parse_scalar(key, value);
    else if (key == "horizon_visibility_factor") e.horizon_visibility_factor = parse_scalar(key, value);
    else if (key == "fog_visibility_slope") e.fog_visibility_slope = parse_scalar(key, value);
    else if (key == "fog_baseline_pct") e.fog_baseline_pct = parse_scalar(key, value);
    else if (key == "detection_range_min_m") e.detection_range_min_m = parse_scalar(key, value);
    else if (key == "safe_gap_m") d.safe_gap_m = parse_scalar(key, value);
    else throw ConfigError("unknown config key: " + key);
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    Config cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + " is not key = value");
        }
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    if (cfg.sampler.n_vehicles_min > cfg.sampler.n_vehicles_max ||
        cfg.sampler.speed_min_kmh > cfg.sampler.speed_max_kmh ||
        cfg.sampler.spawn_gap_min_m > cfg.sampler.spawn_gap_max_m) {
        throw ConfigError("config bounds must satisfy min <= max");
    }
    return cfg;
}

std::string config_echo(const Config& cfg) {
    const auto& s = cfg.sampler;
    const auto& e = cfg.engine;
    std::ostringstream os;
    os << "n_vehicles_min = " << s.n_vehicles_min << '\n'
       << "n_vehicles_max = " << s.n_vehicles_max << '\n'
       << "speed_min_kmh = " << s.speed_min_kmh << '\n'
       << "speed_max_kmh = " << s.speed_max_kmh << '\n'
       << "preceding_speed_margin_kmh = " << s.preceding_speed_margin_kmh << '\n'
       << "spawn_gap_min_m = " << format_scalar(s.spawn_gap_min_m) << '\n'
       << "spawn_gap_max_m = " << format_scalar(s.spawn_gap_max_m) << '\n'
       << "min_spawn_clearance_m = " << format_scalar(s.min_spawn_clearance_m) << '\n'
       << "placement_max_retries = " << s.placement_max_retries << '\n';
    os << "mv_choices_kmh = ";
    for (std::size_t i = 0; i < s.mv_choices_kmh.size(); ++i) {
        if (i) os << ',';
        os << s.mv_choices_kmh[i];
    }
    os << '\n';
    if (!s.preset_whitelist.empty()) {
        os << "presets = ";
        for (std::size_t i = 0; i < s.preset_whitelist.size(); ++i) {
            if (i) os << ',';
            os << s.preset_whitelist[i];
        }
        os << '\n';
    }
    for (int k = 0; k < kNumVehicleKinds; ++k) {
        const auto& d = s.dims[k];
        os << "dims_" << to_string(static_cast<VehicleKind>(k)) << " = "
           << format_scalar(d.length) << 'x' << format_scalar(d.width) << 'x'
           << format_scalar(d.height) << '\n';
    }
    os << "dt_s = " << format_scalar(e.dt) << '\n'
       << "duration_s = " << format_scalar(e.duration) << '\n'
       << "trigger_gap_m = " << format_scalar(e.trigger_gap_m) << '\n'
       << "return_margin_m = " << format_scalar(e.return_margin_m) << '\n'
       << "return_clearance_m = " << format_scalar(e.return_clearance_m) << '\n'
       << "lane_change_ref_speed_kmh = " << format_scalar(e.lane_change_ref_speed_kmh) << '\n'
       << "lane_change_scale_s = " << format_scalar(e.lane_change_scale_s) << '\n'
       << "lane_change_min_s = " << format_scalar(e.lane_change_min_s) << '\n'
       << "lane_change_max_s = " << format_scalar(e.lane_change_max_s) << '\n'
       << "accel_max_mps2 = " << format_scalar(e.accel_max_mps2) << '\n'
       << "brake_comfort_mps2 = " << format_scalar(e.brake_comfort_mps2) << '\n'
       << "brake_max_mps2 = " << format_scalar(e.brake_max_mps2) << '\n'
       << "idm_headway_s = " << format_scalar(e.idm_headway_s) << '\n'
       << "idm_min_gap_m = " << format_scalar(e.idm_min_gap_m) << '\n'
       << "npc_accel_max_mps2 = " << format_scalar(e.npc_accel_max_mps2) << '\n'
       << "y_pert_max_m = " << format_scalar(e.y_pert_max_m) << '\n'
       << "pert_interval_min_frames = " << e.pert_interval_min_frames << '\n'
       << "pert_interval_max_frames = " << e.pert_interval_max_frames << '\n'
       << "pert_decay_tau_s = " << format_scalar(e.pert_decay_tau_s) << '\n'
       << "detection_range_m = " << format_scalar(e.detection_range_m) << '\n'
       << "cloud_visibility_factor = " << format_scalar(e.cloud_visibility_factor) << '\n'
       << "cloud_threshold_pct = " << format_scalar(e.cloud_threshold_pct) << '\n'
       << "horizon_visibility_factor = " << format_scalar(e.horizon_visibility_factor) << '\n'
       << "fog_visibility_slope = " << format_scalar(e.fog_visibility_slope) << '\n'
       << "fog_baseline_pct = " << format_scalar(e.fog_baseline_pct) << '\n'
       << "detection_range_min_m = " << format_scalar(e.detection_range_min_m) << '\n'
       << "safe_gap_m = " << format_scalar(cfg.detector.safe_gap_m) << '\n';
    return os.str();
}

}  // namespace ovtsim
