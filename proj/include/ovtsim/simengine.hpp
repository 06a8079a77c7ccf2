#ifndef OVTSIM_SIMENGINE_HPP
#define OVTSIM_SIMENGINE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ovtsim/config.hpp"
#include "ovtsim/sampler.hpp"
#include "ovtsim/types.hpp"

namespace ovtsim {

struct VehicleState {
    int id = 0;
    Scalar x = 0;
    Scalar y = 0;
    int lane = 1;
    Scalar speed_kmh = 0;
    Scalar accel_mps2 = 0;
    Eigen::Vector2d wheel_dir{0, 0};
    bool alive = true;
};

struct CollisionEvent {
    int frame = 0;
    int other_id = 0;
};

enum class EgoPhase {
    FOLLOW,
    CHANGING_LEFT,
    PASSING,
    CHANGING_RIGHT,
    DONE,
    ABORTED,
};

struct EgoControllerState {
    EgoPhase phase = EgoPhase::FOLLOW;
    std::optional<int> target_id;
    Scalar t_phase_start = 0;
    int home_lane = 1;   // lane the manoeuvre must return to
    int from_lane = 1;
    int to_lane = 1;
    Scalar lane_change_duration = 0;
    Scalar pert_offset = 0;  // lateral displacement accumulated from weather
};

// Static per-vehicle description carried alongside the frame list.
struct VehicleMeta {
    int id = 0;
    std::optional<VehicleKind> kind;
    std::string colour;
    KindDims dims;
    int target_speed_kmh = 0;
    int lane0 = 1;
    Scalar x0 = 0;
};

struct VehicleFrame {
    int id = 0;
    KindDims dims;
    Scalar x = 0;
    Scalar y = 0;
    int lane = 1;
    Scalar speed_kmh = 0;
    Eigen::Vector2d dir{0, 0};
    Scalar accel_mps2 = 0;
};

struct FrameRecord {
    int sim = 1;
    int frame = 0;
    Scalar ts = 0;
    int id_ego = 0;
    std::vector<VehicleFrame> vehicles;
    int mv_kmh = 0;
    std::string right_line;  // "Solid" / "Broken"
    std::string left_line;
    Scalar lane_width = 3.5;
    Scalar lane_width_right = 3.5;
    Scalar lane_width_left = 3.5;
    std::optional<int> collision_with;  // set only at the contact frame
    Scalar precipitation = 0;
    Scalar fog = 0;
    Scalar wind = 0;
    bool night = false;
    bool horizon_line = false;
    int ov = 0;
};

struct SimulationLog {
    int sim_id = 1;
    std::uint64_t seed = 0;
    Scalar duration = 20.0;
    Scalar dt = 0.05;
    int mv_limit_kmh = 0;
    WeatherPreset preset;
    int ego_id = 0;
    std::vector<VehicleMeta> vehicles;
    std::vector<FrameRecord> frames;

    const VehicleMeta* find_vehicle(int id) const;
    const VehicleFrame* vehicle_in_frame(int frame, int id) const;
};

struct WorldState {
    SimClock clock;
    std::vector<VehicleState> vehicles;
    int ego_id = 0;
    WeatherPreset preset;
    std::optional<CollisionEvent> collision;
    std::vector<int> ov_frames;
};

// Cosine-eased lateral profile: rest-to-rest between lane centers.
Scalar lateral_offset(Scalar t_since_start, Scalar t_lc, Scalar from_y, Scalar to_y);

// Axis-aligned footprint overlap (length along x, width along y).
bool detect_collision(Scalar xa, Scalar ya, const KindDims& da, Scalar xb, Scalar yb,
                      const KindDims& db);
bool detect_collision(const VehicleState& a, const KindDims& da, const VehicleState& b,
                      const KindDims& db);

// Euclidean clearance between two footprints; 0 when overlapping.
Scalar bounding_box_gap(Scalar xa, Scalar ya, const KindDims& da, Scalar xb, Scalar yb,
                        const KindDims& db);

// Frames between lateral gust events for a preset: long intervals in calm
// weather, short in heavy rain and wind.
int perturbation_interval_frames(const WeatherPreset& preset, const EngineConfig& cfg = {});

// Lateral displacement applied at this frame (0 off the event grid). Sign is
// the wind direction, drawn per event.
Scalar lateral_perturbation(const WeatherPreset& preset, RngStream& rng, int frame,
                            const EngineConfig& cfg = {});

Scalar effective_detection_range(const WeatherPreset& preset, const EngineConfig& cfg = {});

struct RescaledSpeed {
    Scalar sim_speed_kmh = 0;
    Scalar time_scale = 3.0;
};

// Compatibility transform for engines capped at 40 km/h during lane changes;
// the native engine does not use it.
RescaledSpeed rule_of_three_rescale(Scalar speed_kmh);

// Line types and widths seen from a lane (interior lines broken, roadway
// edges solid with a 0.5 m shoulder).
struct LaneContext {
    std::string right_line;
    std::string left_line;
    Scalar width_right = 3.5;
    Scalar width_left = 3.5;
};
LaneContext lane_context(int lane);

// Runs one scenario to completion and returns the full frame log.
SimulationLog run(const ScenarioSpec& spec, const EngineConfig& cfg = {});

// Advances the world by one frame. Exposed for unit tests; run() drives it.
// meta is aligned with world.vehicles by index.
void step(WorldState& world, EgoControllerState& ctrl, const std::vector<VehicleMeta>& meta,
          RngStream& rng, const EngineConfig& cfg);

}  // namespace ovtsim

#endif  // OVTSIM_SIMENGINE_HPP
