#include "ovtsim/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace ovtsim {

const std::vector<std::string> kVehicleColours = {
    "yellow", "blue", "red", "green", "orange", "grey", "white", "brown"};

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t scenario_seed(std::uint64_t master_seed, int sim_id) {
    return mix64(master_seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(sim_id));
}

const std::vector<WeatherPreset>& preset_catalog() {
    // name, night, horizon line, cloudiness, precipitation, wind, fog.
    // Wind tracks precipitation with a floor of 10.
    static const std::vector<WeatherPreset> catalog = {
        {"ClearNoon", false, false, 5, 0, 10, 2},
        {"ClearSunset", false, true, 5, 0, 10, 2},
        {"SoftRainNoon", false, false, 40, 30, 30, 10},
        {"HardRainNoon", false, false, 90, 100, 100, 20},
        {"ClearNight", true, false, 5, 0, 10, 2},
        {"CloudyNight", true, false, 90, 0, 10, 90},
        {"SoftRainNight", true, false, 40, 30, 30, 30},
        {"MidRainNight", true, false, 70, 60, 60, 60},
        {"HardRainNight", true, false, 90, 100, 100, 100},
    };
    return catalog;
}

const WeatherPreset& preset_by_name(std::string_view name) {
    for (const auto& p : preset_catalog()) {
        if (p.name == name) return p;
    }
    throw UnknownCategoryError("unknown weather preset: " + std::string(name));
}

namespace {

constexpr LaneGeometry kGeom{};

Scalar bbox_gap_1d(Scalar xa, Scalar la, Scalar xb, Scalar lb) {
    return std::abs(xa - xb) - (la + lb) / 2;
}

bool lane_placement_ok(const std::vector<VehicleSpawn>& vehicles, Scalar clearance) {
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
            if (vehicles[i].lane0 != vehicles[j].lane0) continue;
            if (bbox_gap_1d(vehicles[i].x0, vehicles[i].dims.length, vehicles[j].x0,
                            vehicles[j].dims.length) < clearance) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

ScenarioSpec sample_scenario(std::uint64_t seed, const Config& cfg, int sim_id) {
    const auto& sc = cfg.sampler;
    if (sc.n_vehicles_min > sc.n_vehicles_max || sc.speed_min_kmh > sc.speed_max_kmh ||
        sc.spawn_gap_min_m > sc.spawn_gap_max_m) {
        throw ConfigError("sampler bounds must satisfy min <= max");
    }
    RngStream rng(seed);

    ScenarioSpec spec;
    spec.sim_id = sim_id;
    spec.seed = seed;
    spec.duration = cfg.engine.duration;
    spec.dt = cfg.engine.dt;

    std::vector<const WeatherPreset*> presets;
    if (sc.preset_whitelist.empty()) {
        for (const auto& p : preset_catalog()) presets.push_back(&p);
    } else {
        for (const auto& name : sc.preset_whitelist) presets.push_back(&preset_by_name(name));
    }
    spec.preset = *presets[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(presets.size()) - 1))];
    spec.mv_limit_kmh =
        sc.mv_choices_kmh[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(sc.mv_choices_kmh.size()) - 1))];

    const int n = rng.uniform_int(sc.n_vehicles_min, sc.n_vehicles_max);
    spec.vehicles.resize(static_cast<std::size_t>(n));
    spec.ego_index = 0;

    static const VehicleKind kEgoKinds[] = {VehicleKind::S, VehicleKind::M, VehicleKind::L,
                                            VehicleKind::V, VehicleKind::T};
    auto draw_colour = [&] { return kVehicleColours[static_cast<std::size_t>(rng.uniform_int(0, 7))]; };
    auto dims_of = [&](VehicleKind k) { return sc.dims[static_cast<int>(k)]; };

    VehicleSpawn& ego = spec.vehicles[0];
    ego.kind = kEgoKinds[rng.uniform_int(0, 4)];
    ego.dims = dims_of(ego.kind);
    ego.colour = draw_colour();
    ego.lane0 = rng.uniform_int(1, kGeom.n_lanes - 1);  // never the leftmost lane
    ego.target_speed_kmh = rng.uniform_int(sc.speed_min_kmh, sc.speed_max_kmh);

    // Guaranteed slower vehicle ahead in the ego's lane.
    VehicleSpawn& lead = spec.vehicles[1];
    lead.kind = static_cast<VehicleKind>(rng.uniform_int(0, kNumVehicleKinds - 1));
    lead.dims = dims_of(lead.kind);
    lead.colour = draw_colour();
    lead.lane0 = ego.lane0;
    lead.target_speed_kmh = rng.uniform_int(
        sc.speed_min_kmh,
        std::max(sc.speed_min_kmh, ego.target_speed_kmh - sc.preceding_speed_margin_kmh));

    for (int i = 2; i < n; ++i) {
        VehicleSpawn& v = spec.vehicles[static_cast<std::size_t>(i)];
        v.kind = static_cast<VehicleKind>(rng.uniform_int(0, kNumVehicleKinds - 1));
        v.dims = dims_of(v.kind);
        v.colour = draw_colour();
        v.target_speed_kmh = rng.uniform_int(sc.speed_min_kmh, sc.speed_max_kmh);
    }

    // Other traffic spawns off the ego's lane; within a lane the car ahead is
    // never slower, so plain target-speed following cannot produce contact.
    std::vector<int> other_lanes;
    for (int l = 1; l <= kGeom.n_lanes; ++l) {
        if (l != ego.lane0) other_lanes.push_back(l);
    }

    bool placed = false;
    for (int attempt = 0; attempt < sc.placement_max_retries && !placed; ++attempt) {
        const Scalar half_span = (ego.dims.length + lead.dims.length) / 2;
        const Scalar ego_hi = kGeom.x_max - (half_span + sc.spawn_gap_min_m) - 1.0;
        ego.x0 = rng.uniform_real(kGeom.x_min, std::max(kGeom.x_min, ego_hi));
        const Scalar gap = rng.uniform_real(sc.spawn_gap_min_m, sc.spawn_gap_max_m);
        lead.x0 = ego.x0 + half_span + gap;
        if (lead.x0 > kGeom.x_max) continue;
        for (int i = 2; i < n; ++i) {
            VehicleSpawn& v = spec.vehicles[static_cast<std::size_t>(i)];
            v.lane0 = other_lanes[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<int>(other_lanes.size()) - 1))];
            v.x0 = rng.uniform_real(kGeom.x_min, kGeom.x_max);
        }
        placed = lane_placement_ok(spec.vehicles, sc.min_spawn_clearance_m);
    }
    if (!placed) {
        throw PlacementFailure("could not place " + std::to_string(n) +
                               " vehicles without overlap in " +
                               std::to_string(sc.placement_max_retries) + " attempts");
    }

    // Front-to-back speed ordering per lane among the other traffic.
    for (int lane : other_lanes) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 2; i < spec.vehicles.size(); ++i) {
            if (spec.vehicles[i].lane0 == lane) idx.push_back(i);
        }
        if (idx.size() < 2) continue;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return spec.vehicles[a].x0 > spec.vehicles[b].x0;
        });
        std::vector<int> speeds;
        for (std::size_t i : idx) speeds.push_back(spec.vehicles[i].target_speed_kmh);
        std::sort(speeds.rbegin(), speeds.rend());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            spec.vehicles[idx[k]].target_speed_kmh = speeds[k];
        }
    }

    // Quantize spawn positions to the logged precision.
    for (auto& v : spec.vehicles) v.x0 = quantize2(v.x0);

    return spec;
}

std::vector<std::string> validate_scenario(const ScenarioSpec& spec) {
    std::vector<std::string> report;
    const int n = static_cast<int>(spec.vehicles.size());
    if (n < 2 || n > 6) {
        report.push_back("vehicle count " + std::to_string(n) + " out of [2,6]");
    }
    if (spec.ego_index < 0 || spec.ego_index >= n) {
        report.push_back("ego index " + std::to_string(spec.ego_index) + " out of range");
        return report;
    }
    const VehicleSpawn& ego = spec.vehicles[static_cast<std::size_t>(spec.ego_index)];
    if (!ego_capable(ego.kind)) {
        report.push_back("ego kind " + std::string(to_string(ego.kind)) + " not allowed");
    }
    if (ego.lane0 < 1 || ego.lane0 > kGeom.n_lanes - 1) {
        report.push_back("ego on lane " + std::to_string(ego.lane0));
    }
    for (int i = 0; i < n; ++i) {
        const VehicleSpawn& v = spec.vehicles[static_cast<std::size_t>(i)];
        if (v.target_speed_kmh < 50 || v.target_speed_kmh > 120) {
            report.push_back("vehicle " + std::to_string(i) + " speed " +
                             std::to_string(v.target_speed_kmh) + " out of [50,120]");
        }
        if (v.x0 < kGeom.x_min || v.x0 > kGeom.x_max) {
            report.push_back("vehicle " + std::to_string(i) + " x0 " +
                             std::to_string(v.x0) + " out of [320,450]");
        }
        if (v.lane0 < 1 || v.lane0 > kGeom.n_lanes) {
            report.push_back("vehicle " + std::to_string(i) + " lane " +
                             std::to_string(v.lane0) + " out of 1..5");
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = spec.vehicles[static_cast<std::size_t>(i)];
            const auto& b = spec.vehicles[static_cast<std::size_t>(j)];
            if (a.lane0 == b.lane0 &&
                bbox_gap_1d(a.x0, a.dims.length, b.x0, b.dims.length) < 0) {
                report.push_back("vehicles " + std::to_string(i) + " and " +
                                 std::to_string(j) + " spawn boxes overlap");
            }
        }
    }
    return report;
}

}  // namespace ovtsim
