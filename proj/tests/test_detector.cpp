#include <optional>

#include "doctest.h"
#include "ovtsim/detector.hpp"
#include "ovtsim/sampler.hpp"

using namespace ovtsim;

namespace {

// Hand-built two-vehicle log: the ego (id 1) and a target (id 2). Per-frame
// knobs cover everything the detector reads.
struct FrameSpec {
    int ego_lane = 2;
    Scalar ego_speed = 80;
    int ov = 0;
    std::optional<int> collision;
    Scalar ego_x = 340;
    Scalar target_x = 380;
    std::optional<Scalar> ego_y;  // overrides the lane-center position
    std::string left_line = "Broken";
    std::string right_line = "Broken";
};

SimulationLog make_log(const std::vector<FrameSpec>& frames, int mv = 90) {
    SimulationLog log;
    log.sim_id = 1;
    log.dt = 0.05;
    log.duration = 0.05 * static_cast<Scalar>(frames.size() - 1);
    log.mv_limit_kmh = mv;
    log.ego_id = 1;
    log.preset = preset_by_name("ClearNoon");

    VehicleMeta ego;
    ego.id = 1;
    ego.kind = VehicleKind::S;
    ego.dims = default_dims(VehicleKind::S);
    VehicleMeta target;
    target.id = 2;
    target.kind = VehicleKind::M;
    target.dims = default_dims(VehicleKind::M);
    log.vehicles = {ego, target};

    for (std::size_t f = 0; f < frames.size(); ++f) {
        const FrameSpec& fs = frames[f];
        FrameRecord rec;
        rec.sim = 1;
        rec.frame = static_cast<int>(f);
        rec.ts = grid_timestamp(rec.frame, log.dt);
        rec.id_ego = 1;
        VehicleFrame e;
        e.id = 1;
        e.dims = ego.dims;
        e.x = fs.ego_x;
        e.y = fs.ego_y ? *fs.ego_y : lane_center(fs.ego_lane);
        e.lane = fs.ego_lane;
        e.speed_kmh = fs.ego_speed;
        VehicleFrame t;
        t.id = 2;
        t.dims = target.dims;
        t.x = fs.target_x;
        t.y = lane_center(2);
        t.lane = 2;
        t.speed_kmh = 60;
        rec.vehicles = {e, t};
        rec.mv_kmh = mv;
        rec.right_line = fs.right_line;
        rec.left_line = fs.left_line;
        rec.lane_width = 3.5;
        rec.lane_width_right = 3.5;
        rec.lane_width_left = 3.5;
        rec.collision_with = fs.collision;
        rec.precipitation = 0;
        rec.fog = 2;
        rec.wind = 10;
        rec.ov = fs.ov;
        log.frames.push_back(rec);
    }
    return log;
}

// Ten frames; OV at 2 and 6; in the left lane for frames 2..7.
std::vector<FrameSpec> completed_pass() {
    std::vector<FrameSpec> frames(10);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        frames[f].ego_lane = (f >= 2 && f < 8) ? 3 : 2;
        frames[f].ego_x = 340 + 2.0 * static_cast<Scalar>(f);
        frames[f].target_x = 345 + 0.5 * static_cast<Scalar>(f);
    }
    frames[2].ov = 1;
    frames[6].ov = 1;
    return frames;
}

}  // namespace

TEST_CASE("two OV marks with a return reach the final stage") {
    const SimulationLog log = make_log(completed_pass());
    const ManeuverTrace trace = stage_trace(log);
    CHECK(trace.stages == StageReached::STAGE3);
    CHECK(trace.t_a == doctest::Approx(0.10));
    CHECK(trace.t_b == doctest::Approx(0.30));
    CHECK(trace.initial_lane == 2);
    CHECK(trace.final_lane == 2);
    CHECK(*trace.end_frame == 8);  // first frame back in the spawn lane
}

TEST_CASE("one OV mark or a missed return stops at the second stage") {
    auto frames = completed_pass();
    frames[6].ov = 0;  // never turns back
    for (std::size_t f = 6; f < frames.size(); ++f) frames[f].ego_lane = 3;
    const ManeuverTrace trace = stage_trace(make_log(frames));
    CHECK(trace.stages == StageReached::STAGE2);
    CHECK(!trace.t_b);
    CHECK(*trace.end_frame == 9);  // runs to the end of the recording

    // Two marks but still in the left lane at the end.
    auto cut = completed_pass();
    for (std::size_t f = 6; f < cut.size(); ++f) cut[f].ego_lane = 3;
    CHECK(stage_trace(make_log(cut)).stages == StageReached::STAGE2);
}

TEST_CASE("no OV marks means no manoeuvre") {
    std::vector<FrameSpec> frames(10);
    const ManeuverTrace trace = stage_trace(make_log(frames));
    CHECK(trace.stages == StageReached::NONE);
    CHECK(!trace.t_a);
    CHECK(!trace.end_frame);
}

TEST_CASE("malformed logs are rejected") {
    SimulationLog log = make_log(completed_pass());
    log.frames[5].frame = 3;  // non-monotone
    CHECK_THROWS_AS(stage_trace(log), MalformedLogError);

    SimulationLog dropped = make_log(completed_pass());
    dropped.frames[4].vehicles.pop_back();
    CHECK_THROWS_AS(stage_trace(dropped), MalformedLogError);

    SimulationLog marks = make_log(completed_pass());
    marks.frames[9].ov = 1;  // third mark
    CHECK_THROWS_AS(stage_trace(marks), MalformedLogError);

    CHECK_THROWS_AS(stage_trace(SimulationLog{}), MalformedLogError);
}

TEST_CASE("classification follows stage and collision state") {
    // Completed, clean, within the limit.
    SimulationLog clean = make_log(completed_pass(), 120);
    ManeuverTrace trace = analyze(clean);
    CHECK(trace.violations.empty());
    CHECK(classify(clean, trace) == ClassLabel::Success_L);

    // Completed but over the limit: speeding makes it illegal.
    SimulationLog fast = make_log(completed_pass(), 70);
    trace = analyze(fast);
    REQUIRE(!trace.violations.empty());
    CHECK(trace.violations[0].rule == RuleKind::SPEEDING);
    CHECK(classify(fast, trace) == ClassLabel::Success_I);

    // Collision after the manoeuvre started.
    auto frames = completed_pass();
    frames[7].collision = 2;
    SimulationLog crashed = make_log(frames, 120);
    trace = analyze(crashed);
    CHECK(classify(crashed, trace) == ClassLabel::Unsuccess_col);
    CHECK(*trace.end_frame == 7);

    // Started but never finished, no contact.
    auto stuck = completed_pass();
    stuck[6].ov = 0;
    for (std::size_t f = 6; f < stuck.size(); ++f) stuck[f].ego_lane = 3;
    SimulationLog open = make_log(stuck, 120);
    trace = analyze(open);
    CHECK(classify(open, trace) == ClassLabel::Unsuccess_ncol);

    // No attempt at all, even with a contact on record.
    std::vector<FrameSpec> idle(10);
    idle[4].collision = 2;
    SimulationLog rearended = make_log(idle, 120);
    trace = analyze(rearended);
    CHECK(classify(rearended, trace) == ClassLabel::No_attempt);
}

TEST_CASE("legality violations cite frames inside the manoeuvre window") {
    SimulationLog fast = make_log(completed_pass(), 70);
    const ManeuverTrace trace = stage_trace(fast);
    const auto violations = legality_check(fast, trace);
    REQUIRE(!violations.empty());
    for (const auto& v : violations) {
        CHECK(v.frame >= *trace.frame_a);
        CHECK(v.frame <= *trace.end_frame);
    }
}

TEST_CASE("crossing a solid line is flagged from the departure-side frame") {
    auto frames = completed_pass();
    frames[1].left_line = "Solid";  // the line the ego crosses at frame 2
    SimulationLog log = make_log(frames, 120);
    const auto violations = legality_check(log, stage_trace(log));
    REQUIRE(!violations.empty());
    CHECK(violations[0].rule == RuleKind::SOLID_LINE_CROSS);
    CHECK(violations[0].frame == 2);
    CHECK(classify(log, analyze(log)) == ClassLabel::Success_I);
}

TEST_CASE("a pass closer than the safe gap is illegal") {
    auto frames = completed_pass();
    // Alongside the target at frame 4 while still low in the lane-3 band:
    // 2 m of lateral separation minus the half-widths leaves 0.15 m.
    frames[4].ego_x = 350;
    frames[4].target_x = 350;
    frames[4].ego_y = 246.0;
    SimulationLog log = make_log(frames, 120);
    const auto violations = legality_check(log, stage_trace(log));
    REQUIRE(!violations.empty());
    bool unsafe = false;
    for (const auto& v : violations) unsafe |= v.rule == RuleKind::UNSAFE_GAP;
    CHECK(unsafe);
}

TEST_CASE("adding a violation to a clean pass flips it to illegal only") {
    SimulationLog clean = make_log(completed_pass(), 120);
    REQUIRE(classify(clean, analyze(clean)) == ClassLabel::Success_L);
    for (int f = 2; f <= 8; ++f) {
        auto frames = completed_pass();
        frames[static_cast<std::size_t>(f)].ego_speed = 125;  // above any limit
        SimulationLog tweaked = make_log(frames, 120);
        CHECK(classify(tweaked, analyze(tweaked)) == ClassLabel::Success_I);
    }
}

TEST_CASE("classification agrees with a literal reference on enumerated logs") {
    // Reference: the class definitions spelled out directly.
    const auto reference = [](int ov_count, bool returned, bool collided,
                              bool violated) -> ClassLabel {
        if (ov_count == 0) return ClassLabel::No_attempt;
        if (collided) return ClassLabel::Unsuccess_col;
        if (ov_count < 2 || !returned) return ClassLabel::Unsuccess_ncol;
        return violated ? ClassLabel::Success_I : ClassLabel::Success_L;
    };

    for (int ov_count = 0; ov_count <= 2; ++ov_count) {
        for (int returned = 0; returned <= 1; ++returned) {
            for (int collided = 0; collided <= 1; ++collided) {
                for (int violated = 0; violated <= 1; ++violated) {
                    if (ov_count < 2 && returned) continue;  // cannot return without leaving
                    std::vector<FrameSpec> frames(10);
                    for (std::size_t f = 0; f < frames.size(); ++f) {
                        frames[f].ego_x = 340 + 2.0 * static_cast<Scalar>(f);
                        frames[f].target_x = 345 + 0.5 * static_cast<Scalar>(f);
                    }
                    if (ov_count >= 1) {
                        frames[2].ov = 1;
                        for (std::size_t f = 2; f < frames.size(); ++f) frames[f].ego_lane = 3;
                    }
                    if (ov_count == 2) {
                        frames[6].ov = 1;
                        if (returned) {
                            for (std::size_t f = 8; f < frames.size(); ++f) {
                                frames[f].ego_lane = 2;
                            }
                        }
                    }
                    if (collided) frames[7].collision = 2;
                    const int mv = violated ? 70 : 120;  // ego at 80 throughout
                    const SimulationLog log = make_log(frames, mv);
                    const ManeuverTrace trace = analyze(log);
                    CHECK(classify(log, trace) ==
                          reference(ov_count, returned == 1, collided == 1, violated == 1));
                }
            }
        }
    }
}
