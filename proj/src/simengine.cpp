#include "ovtsim/simengine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ovtsim {

namespace {

constexpr Scalar kKmhToMs = 1.0 / 3.6;
constexpr std::uint64_t kEngineSalt = 0xC2B2AE3D27D4EB4Full;

struct LeaderInfo {
    int index = -1;
    Scalar gap = std::numeric_limits<Scalar>::infinity();
    Scalar speed_kmh = 0;
    int id = 0;
};

LeaderInfo nearest_ahead(const std::vector<VehicleState>& vehicles,
                         const std::vector<VehicleMeta>& meta, int ego_index,
                         int lane_a, int lane_b) {
    const VehicleState& ego = vehicles[static_cast<std::size_t>(ego_index)];
    const Scalar ego_half = meta[static_cast<std::size_t>(ego_index)].dims.length / 2;
    LeaderInfo best;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        if (static_cast<int>(i) == ego_index) continue;
        const VehicleState& v = vehicles[i];
        if (v.lane != lane_a && v.lane != lane_b) continue;
        if (v.x <= ego.x) continue;
        const Scalar gap = (v.x - ego.x) - ego_half - meta[i].dims.length / 2;
        if (gap < best.gap) {
            best.index = static_cast<int>(i);
            best.gap = gap;
            best.speed_kmh = v.speed_kmh;
            best.id = v.id;
        }
    }
    return best;
}

Scalar idm_accel(Scalar v_ms, Scalar v0_ms, const LeaderInfo& leader,
                 const EngineConfig& cfg) {
    Scalar a;
    const Scalar free_term =
        v0_ms > 0 ? 1.0 - std::pow(v_ms / v0_ms, 4) : (v_ms > 0 ? -1.0 : 0.0);
    if (leader.index < 0) {
        a = cfg.accel_max_mps2 * free_term;
    } else {
        const Scalar s = std::max(leader.gap, 0.1);
        const Scalar dv = v_ms - leader.speed_kmh * kKmhToMs;
        const Scalar desired =
            cfg.idm_min_gap_m +
            std::max(0.0, v_ms * cfg.idm_headway_s +
                              v_ms * dv /
                                  (2 * std::sqrt(cfg.accel_max_mps2 * cfg.brake_comfort_mps2)));
        a = cfg.accel_max_mps2 * (free_term - (desired / s) * (desired / s));
        // Never brake below the leader's speed while a safe gap remains;
        // matching it and holding station is enough.
        if (dv <= 0 && leader.gap > cfg.idm_min_gap_m) a = std::max(a, 0.0);
    }
    return std::clamp(a, -cfg.brake_max_mps2, cfg.accel_max_mps2);
}

Scalar lane_change_duration(Scalar speed_kmh, const EngineConfig& cfg) {
    return std::clamp(cfg.lane_change_scale_s * speed_kmh / cfg.lane_change_ref_speed_kmh,
                      cfg.lane_change_min_s, cfg.lane_change_max_s);
}

}  // namespace

const VehicleMeta* SimulationLog::find_vehicle(int id) const {
    for (const auto& v : vehicles) {
        if (v.id == id) return &v;
    }
    return nullptr;
}

const VehicleFrame* SimulationLog::vehicle_in_frame(int frame, int id) const {
    if (frame < 0 || frame >= static_cast<int>(frames.size())) return nullptr;
    for (const auto& v : frames[static_cast<std::size_t>(frame)].vehicles) {
        if (v.id == id) return &v;
    }
    return nullptr;
}

Scalar lateral_offset(Scalar t_since_start, Scalar t_lc, Scalar from_y, Scalar to_y) {
    if (t_lc <= 0) throw BadDurationError("lane change duration must be positive");
    const Scalar t = std::clamp(t_since_start, 0.0, t_lc);
    const Scalar s = (1.0 - std::cos(M_PI * t / t_lc)) / 2.0;
    return from_y + (to_y - from_y) * s;
}

bool detect_collision(Scalar xa, Scalar ya, const KindDims& da, Scalar xb, Scalar yb,
                      const KindDims& db) {
    return std::abs(xa - xb) < (da.length + db.length) / 2 &&
           std::abs(ya - yb) < (da.width + db.width) / 2;
}

bool detect_collision(const VehicleState& a, const KindDims& da, const VehicleState& b,
                      const KindDims& db) {
    return detect_collision(a.x, a.y, da, b.x, b.y, db);
}

Scalar bounding_box_gap(Scalar xa, Scalar ya, const KindDims& da, Scalar xb, Scalar yb,
                        const KindDims& db) {
    const Scalar gx = std::max(0.0, std::abs(xa - xb) - (da.length + db.length) / 2);
    const Scalar gy = std::max(0.0, std::abs(ya - yb) - (da.width + db.width) / 2);
    return std::hypot(gx, gy);
}

int perturbation_interval_frames(const WeatherPreset& preset, const EngineConfig& cfg) {
    const Scalar intensity = (preset.wind + preset.precipitation) / 200.0;
    const long k = std::lround(cfg.pert_interval_max_frames -
                               (cfg.pert_interval_max_frames - cfg.pert_interval_min_frames) *
                                   intensity);
    return std::max(1, static_cast<int>(k));
}

Scalar lateral_perturbation(const WeatherPreset& preset, RngStream& rng, int frame,
                            const EngineConfig& cfg) {
    const int interval = perturbation_interval_frames(preset, cfg);
    if (frame <= 0 || frame % interval != 0) return 0.0;
    const Scalar magnitude = cfg.y_pert_max_m * (preset.wind + preset.precipitation) / 200.0;
    return rng.sign() * magnitude;
}

Scalar effective_detection_range(const WeatherPreset& preset, const EngineConfig& cfg) {
    Scalar r = cfg.detection_range_m;
    if (preset.cloudiness > cfg.cloud_threshold_pct) r *= cfg.cloud_visibility_factor;
    if (preset.horizon_line) r *= cfg.horizon_visibility_factor;
    const Scalar fog_excess = std::max(0.0, preset.fog - cfg.fog_baseline_pct);
    r *= std::max(0.0, 1.0 - cfg.fog_visibility_slope * fog_excess / 100.0);
    return std::max(r, cfg.detection_range_min_m);
}

RescaledSpeed rule_of_three_rescale(Scalar speed_kmh) {
    if (speed_kmh < 0) throw BadSpeedError("speed must be nonnegative");
    return {speed_kmh * 40.0 / 120.0, 3.0};
}

LaneContext lane_context(int lane) {
    LaneContext ctx{"Broken", "Broken", 3.5, 3.5};
    if (lane == 1) {
        ctx.right_line = "Solid";
        ctx.width_right = 0.5;
    }
    if (lane == kNumLanes) {
        ctx.left_line = "Solid";
        ctx.width_left = 0.5;
    }
    return ctx;
}

void step(WorldState& world, EgoControllerState& ctrl, const std::vector<VehicleMeta>& meta,
          RngStream& rng, const EngineConfig& cfg) {
    const Scalar dt = world.clock.dt;
    const int ego_index = [&] {
        for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
            if (world.vehicles[i].id == world.ego_id) return static_cast<int>(i);
        }
        return -1;
    }();
    if (ego_index < 0 || meta.size() != world.vehicles.size()) {
        throw std::invalid_argument("step needs an ego vehicle and aligned metadata");
    }
    VehicleState& ego = world.vehicles[static_cast<std::size_t>(ego_index)];
    const Scalar range = effective_detection_range(world.preset, cfg);

    // Longitudinal commands from the pre-step state.
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        VehicleState& v = world.vehicles[i];
        const Scalar v_ms = v.speed_kmh * kKmhToMs;
        if (!v.alive) {
            v.accel_mps2 = v_ms > 0 ? -std::min(cfg.brake_max_mps2, v_ms / dt) : 0.0;
            continue;
        }
        if (static_cast<int>(i) == ego_index) {
            // Once a lane change starts the driver commits to the
            // destination lane and follows traffic there.
            int lane_a = ego.lane, lane_b = ego.lane;
            switch (ctrl.phase) {
                case EgoPhase::CHANGING_LEFT:
                case EgoPhase::CHANGING_RIGHT:
                case EgoPhase::PASSING:
                    lane_a = lane_b = ctrl.to_lane;
                    break;
                default:
                    break;
            }
            LeaderInfo leader = nearest_ahead(world.vehicles, meta, ego_index, lane_a, lane_b);
            if (leader.index >= 0 && leader.gap > range) leader = LeaderInfo{};
            const Scalar v0 = meta[i].target_speed_kmh * kKmhToMs;
            v.accel_mps2 = idm_accel(v_ms, v0, leader, cfg);
        } else {
            const Scalar want = (meta[i].target_speed_kmh * kKmhToMs - v_ms) / dt;
            v.accel_mps2 = std::clamp(want, -cfg.npc_accel_max_mps2, cfg.npc_accel_max_mps2);
        }
    }

    // Semi-implicit Euler: speed first, then position with the new speed.
    std::vector<Scalar> prev_y(world.vehicles.size());
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        VehicleState& v = world.vehicles[i];
        prev_y[i] = v.y;
        Scalar v_ms = v.speed_kmh * kKmhToMs + v.accel_mps2 * dt;
        v_ms = std::max(0.0, v_ms);
        v.speed_kmh = v_ms / kKmhToMs;
        v.x += v_ms * dt;
    }

    world.clock.frame += 1;
    const Scalar now = world.clock.timestamp();

    // Ego lateral motion: lane-change profile plus decaying weather offset.
    if (ctrl.phase != EgoPhase::ABORTED) {
        ctrl.pert_offset *= std::exp(-dt / cfg.pert_decay_tau_s);
        ctrl.pert_offset += lateral_perturbation(world.preset, rng, world.clock.frame, cfg);
        Scalar base;
        if (ctrl.phase == EgoPhase::CHANGING_LEFT || ctrl.phase == EgoPhase::CHANGING_RIGHT) {
            base = lateral_offset(now - ctrl.t_phase_start, ctrl.lane_change_duration,
                                  lane_center(ctrl.from_lane), lane_center(ctrl.to_lane));
        } else if (ctrl.phase == EgoPhase::PASSING) {
            base = lane_center(ctrl.to_lane);
        } else {
            base = lane_center(ctrl.home_lane);
        }
        ego.y = base + ctrl.pert_offset;
        ego.lane = lane_of(ego.y);
    }

    // Wheel direction from the realized velocity.
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        VehicleState& v = world.vehicles[i];
        const Scalar vx = v.speed_kmh * kKmhToMs;
        const Scalar vy = (v.y - prev_y[i]) / dt;
        const Scalar norm = std::hypot(vx, vy);
        v.wheel_dir = norm > 1e-9 ? Eigen::Vector2d(vx / norm, vy / norm)
                                  : Eigen::Vector2d(0, 0);
    }

    // First ego contact freezes the collision record and ends the manoeuvre.
    if (ego.alive) {
        for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
            if (static_cast<int>(i) == ego_index || !world.vehicles[i].alive) continue;
            if (detect_collision(ego, meta[static_cast<std::size_t>(ego_index)].dims,
                                 world.vehicles[i], meta[i].dims)) {
                if (!world.collision) {
                    world.collision = CollisionEvent{world.clock.frame, world.vehicles[i].id};
                }
                ego.alive = false;
                world.vehicles[i].alive = false;
                ctrl.phase = EgoPhase::ABORTED;
                break;
            }
        }
    }

    // Manoeuvre state machine.
    switch (ctrl.phase) {
        case EgoPhase::FOLLOW: {
            const LeaderInfo leader =
                nearest_ahead(world.vehicles, meta, ego_index, ego.lane, ego.lane);
            // No new manoeuvre in the final recorded instant.
            const bool time_left = now < world.clock.duration - 1e-9;
            if (time_left && leader.index >= 0 && leader.gap <= range &&
                leader.gap < cfg.trigger_gap_m &&
                meta[static_cast<std::size_t>(ego_index)].target_speed_kmh > leader.speed_kmh &&
                ego.lane < kNumLanes) {
                ctrl.phase = EgoPhase::CHANGING_LEFT;
                ctrl.target_id = leader.id;
                ctrl.home_lane = ego.lane;
                ctrl.from_lane = ego.lane;
                ctrl.to_lane = ego.lane + 1;
                ctrl.t_phase_start = now;
                ctrl.lane_change_duration = lane_change_duration(ego.speed_kmh, cfg);
                world.ov_frames.push_back(world.clock.frame);
            }
            break;
        }
        case EgoPhase::CHANGING_LEFT: {
            if (now - ctrl.t_phase_start >= ctrl.lane_change_duration - 1e-9) {
                ctrl.phase = EgoPhase::PASSING;
            }
            break;
        }
        case EgoPhase::PASSING: {
            const VehicleState* target = nullptr;
            const KindDims* target_dims = nullptr;
            for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
                if (world.vehicles[i].id == *ctrl.target_id) {
                    target = &world.vehicles[i];
                    target_dims = &meta[i].dims;
                    break;
                }
            }
            const Scalar ego_rear =
                ego.x - meta[static_cast<std::size_t>(ego_index)].dims.length / 2;
            const Scalar target_front = target->x + target_dims->length / 2;
            if (ego_rear > target_front + cfg.return_margin_m) {
                bool clear = true;
                for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
                    if (static_cast<int>(i) == ego_index) continue;
                    const VehicleState& w = world.vehicles[i];
                    if (w.lane != ctrl.home_lane) continue;
                    const Scalar gap =
                        std::abs(w.x - ego.x) -
                        (meta[i].dims.length + meta[static_cast<std::size_t>(ego_index)].dims.length) / 2;
                    if (gap < cfg.return_clearance_m) {
                        clear = false;
                        break;
                    }
                }
                if (clear) {
                    ctrl.phase = EgoPhase::CHANGING_RIGHT;
                    ctrl.from_lane = ctrl.to_lane;
                    ctrl.to_lane = ctrl.home_lane;
                    ctrl.t_phase_start = now;
                    ctrl.lane_change_duration = lane_change_duration(ego.speed_kmh, cfg);
                    world.ov_frames.push_back(world.clock.frame);
                }
            }
            break;
        }
        case EgoPhase::CHANGING_RIGHT: {
            if (now - ctrl.t_phase_start >= ctrl.lane_change_duration - 1e-9) {
                ctrl.phase = EgoPhase::DONE;
            }
            break;
        }
        default:
            break;
    }
}

namespace {

FrameRecord make_record(const WorldState& world, const std::vector<VehicleMeta>& meta,
                        const ScenarioSpec& spec) {
    FrameRecord rec;
    rec.sim = spec.sim_id;
    rec.frame = world.clock.frame;
    rec.ts = world.clock.timestamp();
    rec.id_ego = world.ego_id;
    rec.vehicles.reserve(world.vehicles.size());
    for (std::size_t i = 0; i < world.vehicles.size(); ++i) {
        const VehicleState& v = world.vehicles[i];
        VehicleFrame f;
        f.id = v.id;
        f.dims = meta[i].dims;
        f.x = quantize2(v.x);
        f.y = quantize2(v.y);
        f.lane = v.lane;
        f.speed_kmh = quantize2(v.speed_kmh);
        f.dir = Eigen::Vector2d(quantize2(v.wheel_dir.x()), quantize2(v.wheel_dir.y()));
        f.accel_mps2 = quantize2(v.accel_mps2);
        rec.vehicles.push_back(f);
    }
    int ego_lane = 1;
    for (const auto& v : world.vehicles) {
        if (v.id == world.ego_id) ego_lane = v.lane;
    }
    const LaneContext ctx = lane_context(ego_lane);
    rec.mv_kmh = spec.mv_limit_kmh;
    rec.right_line = ctx.right_line;
    rec.left_line = ctx.left_line;
    rec.lane_width = 3.5;
    rec.lane_width_right = ctx.width_right;
    rec.lane_width_left = ctx.width_left;
    if (world.collision && world.collision->frame == world.clock.frame) {
        rec.collision_with = world.collision->other_id;
    }
    rec.precipitation = world.preset.precipitation;
    rec.fog = world.preset.fog;
    rec.wind = world.preset.wind;
    rec.night = world.preset.is_night;
    rec.horizon_line = world.preset.horizon_line;
    rec.ov = (!world.ov_frames.empty() && world.ov_frames.back() == world.clock.frame) ? 1 : 0;
    return rec;
}

}  // namespace

SimulationLog run(const ScenarioSpec& spec, const EngineConfig& cfg) {
    const auto problems = validate_scenario(spec);
    if (!problems.empty()) {
        throw std::invalid_argument("invalid scenario: " + problems.front());
    }

    SimulationLog log;
    log.sim_id = spec.sim_id;
    log.seed = spec.seed;
    log.duration = spec.duration;
    log.dt = spec.dt;
    log.mv_limit_kmh = spec.mv_limit_kmh;
    log.preset = spec.preset;
    log.ego_id = spec.ego_index + 1;

    WorldState world;
    world.clock.dt = spec.dt;
    world.clock.duration = spec.duration;
    world.ego_id = log.ego_id;
    world.preset = spec.preset;

    for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
        const VehicleSpawn& s = spec.vehicles[i];
        VehicleMeta m;
        m.id = static_cast<int>(i) + 1;
        m.kind = s.kind;
        m.colour = s.colour;
        m.dims = s.dims;
        m.target_speed_kmh = s.target_speed_kmh;
        m.lane0 = s.lane0;
        m.x0 = s.x0;
        log.vehicles.push_back(m);

        VehicleState v;
        v.id = m.id;
        v.x = s.x0;
        v.y = lane_center(s.lane0);
        v.lane = s.lane0;
        v.speed_kmh = s.target_speed_kmh;
        v.accel_mps2 = 0;
        v.wheel_dir = s.target_speed_kmh > 0 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 0);
        log.vehicles.back().x0 = s.x0;
        world.vehicles.push_back(v);
    }

    EgoControllerState ctrl;
    ctrl.home_lane = spec.vehicles[static_cast<std::size_t>(spec.ego_index)].lane0;

    RngStream rng(mix64(spec.seed ^ kEngineSalt));

    const int frames = world.clock.frame_count();
    log.frames.reserve(static_cast<std::size_t>(frames));
    log.frames.push_back(make_record(world, log.vehicles, spec));
    for (int f = 1; f < frames; ++f) {
        step(world, ctrl, log.vehicles, rng, cfg);
        log.frames.push_back(make_record(world, log.vehicles, spec));
    }
    return log;
}

}  // namespace ovtsim
