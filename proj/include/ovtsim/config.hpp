#ifndef OVTSIM_CONFIG_HPP
#define OVTSIM_CONFIG_HPP

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "ovtsim/types.hpp"

namespace ovtsim {

struct SamplerConfig {
    int n_vehicles_min = 2;
    int n_vehicles_max = 6;
    int speed_min_kmh = 50;
    int speed_max_kmh = 120;
    // The guaranteed slower vehicle ahead spawns at least this far below the
    // ego target speed; 0 allows equal speeds.
    int preceding_speed_margin_kmh = 12;
    Scalar spawn_gap_min_m = 12.0;
    Scalar spawn_gap_max_m = 60.0;
    Scalar min_spawn_clearance_m = 1.0;
    int placement_max_retries = 1000;
    std::vector<int> mv_choices_kmh = {90, 100, 120};
    std::vector<std::string> preset_whitelist;  // empty = full catalog
    std::array<KindDims, kNumVehicleKinds> dims = {{
        {4.0, 1.8, 1.5},
        {4.6, 1.9, 1.6},
        {5.0, 2.0, 1.8},
        {5.4, 2.0, 2.2},
        {7.5, 2.5, 3.5},
        {2.2, 0.8, 1.4},
        {1.8, 0.6, 1.2},
    }};
};

struct EngineConfig {
    Scalar dt = 0.05;
    Scalar duration = 20.0;

    // Overtake controller thresholds.
    Scalar trigger_gap_m = 40.0;
    Scalar return_margin_m = 5.0;
    Scalar return_clearance_m = 5.0;
    Scalar lane_change_ref_speed_kmh = 80.0;
    Scalar lane_change_scale_s = 2.0;
    Scalar lane_change_min_s = 1.5;
    Scalar lane_change_max_s = 4.0;

    // Longitudinal dynamics.
    Scalar accel_max_mps2 = 2.5;
    Scalar brake_comfort_mps2 = 4.0;
    Scalar brake_max_mps2 = 8.0;
    Scalar idm_headway_s = 1.2;
    Scalar idm_min_gap_m = 2.0;
    Scalar npc_accel_max_mps2 = 3.0;

    // Lateral weather perturbation.
    Scalar y_pert_max_m = 0.3;
    int pert_interval_min_frames = 10;
    int pert_interval_max_frames = 60;
    Scalar pert_decay_tau_s = 0.7;

    // Visibility model.
    Scalar detection_range_m = 80.0;
    Scalar cloud_visibility_factor = 0.6;
    Scalar cloud_threshold_pct = 60.0;
    Scalar horizon_visibility_factor = 0.6;
    Scalar fog_visibility_slope = 0.5;
    Scalar fog_baseline_pct = 2.0;
    Scalar detection_range_min_m = 15.0;
};

struct DetectorConfig {
    Scalar safe_gap_m = 2.0;
};

struct Config {
    SamplerConfig sampler;
    EngineConfig engine;
    DetectorConfig detector;
};

// Flat key=value file, '#' comments. Unknown keys are errors.
Config load_config(const std::filesystem::path& path);
void apply_config_entry(Config& cfg, const std::string& key, const std::string& value);

// Canonical serialization: stable key order, normalized values.
std::string config_echo(const Config& cfg);

}  // namespace ovtsim

#endif  // OVTSIM_CONFIG_HPP
