#include "ovtsim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ovtsim {

std::string_view to_string(RuleKind rule) {
    switch (rule) {
        case RuleKind::SOLID_LINE_CROSS: return "SOLID_LINE_CROSS";
        case RuleKind::SPEEDING: return "SPEEDING";
        case RuleKind::UNSAFE_GAP: return "UNSAFE_GAP";
    }
    return "?";
}

std::string_view to_string(StageReached stage) {
    switch (stage) {
        case StageReached::NONE: return "NONE";
        case StageReached::STAGE2: return "STAGE2";
        case StageReached::STAGE3: return "STAGE3";
    }
    return "?";
}

namespace {

const VehicleFrame& ego_in(const FrameRecord& rec) {
    for (const auto& v : rec.vehicles) {
        if (v.id == rec.id_ego) return v;
    }
    throw MalformedLogError("frame " + std::to_string(rec.frame) + " has no ego vehicle");
}

void check_well_formed(const SimulationLog& log) {
    if (log.frames.empty()) throw MalformedLogError("log has no frames");
    const std::size_t n = log.frames.front().vehicles.size();
    int prev_frame = -1;
    for (const auto& rec : log.frames) {
        if (rec.frame <= prev_frame) {
            throw MalformedLogError("frame numbers not strictly increasing at " +
                                    std::to_string(rec.frame));
        }
        prev_frame = rec.frame;
        if (rec.vehicles.size() != n) {
            throw MalformedLogError("vehicle set changes at frame " + std::to_string(rec.frame));
        }
        ego_in(rec);
    }
}

}  // namespace

ManeuverTrace stage_trace(const SimulationLog& log) {
    check_well_formed(log);
    ManeuverTrace trace;
    trace.initial_lane = ego_in(log.frames.front()).lane;
    trace.final_lane = ego_in(log.frames.back()).lane;

    std::vector<int> ov_frames;
    for (const auto& rec : log.frames) {
        if (rec.ov == 1) ov_frames.push_back(rec.frame);
        if (rec.collision_with && !trace.t_collision) {
            trace.t_collision = grid_timestamp(rec.frame, log.dt);
            trace.collision_with = rec.collision_with;
        }
    }
    if (ov_frames.size() > 2) {
        throw MalformedLogError("more than two OV marks (" +
                                std::to_string(ov_frames.size()) + ")");
    }
    if (!ov_frames.empty()) {
        trace.frame_a = ov_frames[0];
        trace.t_a = grid_timestamp(ov_frames[0], log.dt);
    }
    if (ov_frames.size() == 2) {
        trace.frame_b = ov_frames[1];
        trace.t_b = grid_timestamp(ov_frames[1], log.dt);
    }

    if (ov_frames.size() == 2 && trace.final_lane == trace.initial_lane) {
        trace.stages = StageReached::STAGE3;
    } else if (!ov_frames.empty()) {
        trace.stages = StageReached::STAGE2;
    } else {
        trace.stages = StageReached::NONE;
    }

    // Manoeuvre end: the collision if any, else the return to the initial
    // lane after the second lane change, else the end of the recording.
    if (trace.t_a) {
        const int last = log.frames.back().frame;
        if (trace.t_collision) {
            trace.end_frame = static_cast<int>(std::llround(*trace.t_collision / log.dt));
        } else if (trace.stages == StageReached::STAGE3) {
            int end = last;
            for (const auto& rec : log.frames) {
                if (rec.frame >= *trace.frame_b && ego_in(rec).lane == trace.initial_lane) {
                    end = rec.frame;
                    break;
                }
            }
            trace.end_frame = end;
        } else {
            trace.end_frame = last;
        }
    }
    return trace;
}

std::vector<RuleViolation> legality_check(const SimulationLog& log, const ManeuverTrace& trace,
                                          const DetectorConfig& cfg) {
    std::vector<RuleViolation> out;
    if (!trace.t_a || !trace.end_frame) return out;
    const int f_a = *trace.frame_a;
    const int f_end = *trace.end_frame;

    bool speeding_done = false;
    bool unsafe_done = false;
    int prev_lane = 0;
    const FrameRecord* prev_rec = nullptr;

    for (const auto& rec : log.frames) {
        if (rec.frame > f_end) break;
        const VehicleFrame& ego = ego_in(rec);
        if (rec.frame >= f_a && prev_rec != nullptr && ego.lane != prev_lane) {
            // The line crossed is the one on the departure side of the lane
            // the ego is leaving, as logged in the frame before the crossing.
            const bool leftward = ego.lane > prev_lane;
            const std::string& line = leftward ? prev_rec->left_line : prev_rec->right_line;
            if (line == "Solid") {
                std::ostringstream os;
                os << "crossed solid line between lanes " << prev_lane << " and " << ego.lane;
                out.push_back({RuleKind::SOLID_LINE_CROSS, rec.frame, os.str()});
            }
        }
        if (rec.frame >= f_a) {
            if (!speeding_done && ego.speed_kmh > rec.mv_kmh) {
                std::ostringstream os;
                os << "speed " << ego.speed_kmh << " km/h over limit " << rec.mv_kmh;
                out.push_back({RuleKind::SPEEDING, rec.frame, os.str()});
                speeding_done = true;
            }
            if (!unsafe_done) {
                for (const auto& v : rec.vehicles) {
                    if (v.id == ego.id) continue;
                    const Scalar gap =
                        bounding_box_gap(ego.x, ego.y, ego.dims, v.x, v.y, v.dims);
                    if (gap < cfg.safe_gap_m) {
                        std::ostringstream os;
                        os << "gap " << gap << " m to vehicle " << v.id << " below "
                           << cfg.safe_gap_m;
                        out.push_back({RuleKind::UNSAFE_GAP, rec.frame, os.str()});
                        unsafe_done = true;
                        break;
                    }
                }
            }
        }
        prev_lane = ego.lane;
        prev_rec = &rec;
    }
    return out;
}

ClassLabel classify(const SimulationLog&, const ManeuverTrace& trace) {
    if (trace.stages == StageReached::NONE) return ClassLabel::No_attempt;
    const bool collided = trace.t_collision.has_value();
    if (trace.stages == StageReached::STAGE2 || collided) {
        return collided ? ClassLabel::Unsuccess_col : ClassLabel::Unsuccess_ncol;
    }
    return trace.violations.empty() ? ClassLabel::Success_L : ClassLabel::Success_I;
}

ManeuverTrace analyze(const SimulationLog& log, const DetectorConfig& cfg) {
    ManeuverTrace trace = stage_trace(log);
    if (trace.t_a) trace.violations = legality_check(log, trace, cfg);
    return trace;
}

}  // namespace ovtsim
