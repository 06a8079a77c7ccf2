#ifndef OVTSIM_DETECTOR_HPP
#define OVTSIM_DETECTOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "ovtsim/config.hpp"
#include "ovtsim/simengine.hpp"
#include "ovtsim/types.hpp"

namespace ovtsim {

enum class StageReached { NONE, STAGE2, STAGE3 };

enum class RuleKind { SOLID_LINE_CROSS, SPEEDING, UNSAFE_GAP };

std::string_view to_string(RuleKind rule);
std::string_view to_string(StageReached stage);

struct RuleViolation {
    RuleKind rule = RuleKind::SPEEDING;
    int frame = 0;
    std::string detail;
};

struct ManeuverTrace {
    std::optional<Scalar> t_a;          // first lane-change start
    std::optional<Scalar> t_b;          // second lane-change start
    std::optional<Scalar> t_collision;
    std::optional<int> collision_with;
    StageReached stages = StageReached::NONE;
    int initial_lane = 1;
    int final_lane = 1;
    std::optional<int> frame_a;
    std::optional<int> frame_b;
    std::optional<int> end_frame;       // manoeuvre end, when an attempt exists
    std::vector<RuleViolation> violations;
};

// Reads OV marks, the collision column, and lane membership out of a frame
// log. Throws MalformedLogError on schema violations.
ManeuverTrace stage_trace(const SimulationLog& log);

// Traffic-rule audit of the manoeuvre window [t_a, end].
std::vector<RuleViolation> legality_check(const SimulationLog& log, const ManeuverTrace& trace,
                                          const DetectorConfig& cfg = {});

ClassLabel classify(const SimulationLog& log, const ManeuverTrace& trace);

// stage_trace + legality_check in one pass.
ManeuverTrace analyze(const SimulationLog& log, const DetectorConfig& cfg = {});

}  // namespace ovtsim

#endif  // OVTSIM_DETECTOR_HPP
