#include "ovtsim/features.hpp"

#include <cmath>
#include <limits>

namespace ovtsim {

const std::array<std::string, 16> kFeatureColumns = {
    "DN", "HL", "TE", "TP", "WT", "OT", "NV", "SE",
    "SP", "DSEP", "D", "OLR", "PREC", "WIND", "FOG", "CLASS"};

namespace {

constexpr LaneGeometry kGeom{};

const VehicleFrame& ego_in(const FrameRecord& rec) {
    for (const auto& v : rec.vehicles) {
        if (v.id == rec.id_ego) return v;
    }
    throw MalformedLogError("frame " + std::to_string(rec.frame) + " has no ego vehicle");
}

VehicleKind kind_of(const SimulationLog& log, int id) {
    const VehicleMeta* meta = log.find_vehicle(id);
    if (!meta || !meta->kind) {
        throw MalformedLogError("vehicle " + std::to_string(id) + " has no recorded kind");
    }
    return *meta->kind;
}

int frame_at(const SimulationLog& log, Scalar t) {
    const int frame = static_cast<int>(std::llround(t / log.dt));
    if (std::abs(t - grid_timestamp(frame, log.dt)) > 1e-9 || frame < 0 ||
        frame >= static_cast<int>(log.frames.size())) {
        throw BadInstantError("instant " + std::to_string(t) + " is not a recorded frame");
    }
    return frame;
}

}  // namespace

int resolve_target(const SimulationLog& log, int frame) {
    const FrameRecord& rec = log.frames.at(static_cast<std::size_t>(frame));
    const VehicleFrame& ego = ego_in(rec);
    int best = -1;
    Scalar best_dx = std::numeric_limits<Scalar>::infinity();
    for (const auto& v : rec.vehicles) {
        if (v.id == ego.id || v.lane != ego.lane || v.x <= ego.x) continue;
        if (v.x - ego.x < best_dx) {
            best_dx = v.x - ego.x;
            best = v.id;
        }
    }
    return best;
}

Scalar occupancy_rate(const FrameRecord& rec, int lane) {
    if (lane < 1 || lane > kGeom.n_lanes) {
        throw BadLaneError("lane index " + std::to_string(lane) + " out of 1..5");
    }
    Scalar covered = 0;
    for (const auto& v : rec.vehicles) {
        if (v.lane == lane && v.x >= kGeom.x_min && v.x <= kGeom.x_max) {
            covered += v.dims.length;
        }
    }
    return covered * 100.0 / kGeom.window_length();
}

StaticFields extract_static(const SimulationLog& log, const ManeuverTrace& trace,
                            ClassLabel label) {
    StaticFields out;
    out.night = log.preset.is_night;
    out.horizon = log.preset.horizon_line;
    out.te = kind_of(log, log.ego_id);
    const int target = resolve_target(log, 0);
    if (target < 0) throw MalformedLogError("no preceding vehicle at the first frame");
    out.tp = kind_of(log, target);
    out.nv = static_cast<int>(log.frames.front().vehicles.size());
    if (label == ClassLabel::No_attempt) {
        out.wt = quantize2(log.duration);
        out.ot = 0;
    } else {
        out.wt = quantize2(*trace.t_a);
        out.ot = quantize2(grid_timestamp(*trace.end_frame - *trace.frame_a, log.dt));
    }
    return out;
}

DynamicFields extract_dynamic_at(const SimulationLog& log, Scalar t, int target_id) {
    const int frame = frame_at(log, t);
    const FrameRecord& rec = log.frames[static_cast<std::size_t>(frame)];
    const VehicleFrame& ego = ego_in(rec);
    const VehicleFrame* target = log.vehicle_in_frame(frame, target_id);
    if (!target) {
        throw MalformedLogError("vehicle " + std::to_string(target_id) + " missing at frame " +
                                std::to_string(frame));
    }
    DynamicFields out;
    out.se = ego.speed_kmh;
    out.sp = target->speed_kmh;
    out.dsep = quantize2(out.se - out.sp);
    out.d = quantize2(std::hypot(ego.x - target->x, ego.y - target->y));
    const int left = ego.lane + 1;
    out.olr = left <= kGeom.n_lanes ? quantize2(occupancy_rate(rec, left)) : 0.0;
    out.prec = rec.precipitation;
    out.wind = rec.wind;
    out.fog = rec.fog;
    return out;
}

FeatureRow feature_row(const SimulationLog& log, const ManeuverTrace& trace,
                       ClassLabel label) {
    FeatureRow row;
    const StaticFields st = extract_static(log, trace, label);
    row.night = st.night;
    row.horizon = st.horizon;
    row.te = st.te;
    row.tp = st.tp;
    row.wt = st.wt;
    row.ot = st.ot;
    row.nv = st.nv;
    row.cls = label;

    if (label != ClassLabel::No_attempt) {
        const DynamicFields dyn = extract_dynamic_at(log, *trace.t_a, resolve_target(log, 0));
        row.se = dyn.se;
        row.sp = dyn.sp;
        row.dsep = dyn.dsep;
        row.d = dyn.d;
        row.olr = dyn.olr;
        row.prec = dyn.prec;
        row.wind = dyn.wind;
        row.fog = dyn.fog;
        return row;
    }

    // Frame-averaged dynamics with the per-frame nearest preceding vehicle.
    Scalar se_sum = 0, olr_sum = 0;
    Scalar sp_sum = 0, d_sum = 0;
    std::size_t n = 0, n_target = 0;
    for (const auto& rec : log.frames) {
        const VehicleFrame& ego = ego_in(rec);
        se_sum += ego.speed_kmh;
        const int left = ego.lane + 1;
        olr_sum += left <= kGeom.n_lanes ? occupancy_rate(rec, left) : 0.0;
        ++n;
        const int target = resolve_target(log, rec.frame);
        if (target >= 0) {
            const VehicleFrame* tv = log.vehicle_in_frame(rec.frame, target);
            sp_sum += tv->speed_kmh;
            d_sum += std::hypot(ego.x - tv->x, ego.y - tv->y);
            ++n_target;
        }
    }
    row.se = quantize2(se_sum / static_cast<Scalar>(n));
    row.olr = quantize2(olr_sum / static_cast<Scalar>(n));
    row.sp = n_target ? quantize2(sp_sum / static_cast<Scalar>(n_target)) : 0.0;
    row.d = n_target ? quantize2(d_sum / static_cast<Scalar>(n_target)) : 0.0;
    row.dsep = quantize2(row.se - row.sp);
    row.prec = log.preset.precipitation;
    row.wind = log.preset.wind;
    row.fog = log.preset.fog;
    return row;
}

EncodedRow encode_categorical(const FeatureRow& row) {
    EncodedRow out;
    out.values[0] = row.night ? 1 : 0;
    out.values[1] = row.horizon ? 1 : 0;
    out.values[2] = encode_vehicle_kind(row.te);
    out.values[3] = encode_vehicle_kind(row.tp);
    out.values[4] = row.wt;
    out.values[5] = row.ot;
    out.values[6] = row.nv;
    out.values[7] = row.se;
    out.values[8] = row.sp;
    out.values[9] = row.dsep;
    out.values[10] = row.d;
    out.values[11] = row.olr;
    out.values[12] = row.prec;
    out.values[13] = row.wind;
    out.values[14] = row.fog;
    out.cls = row.cls;
    return out;
}

FeatureRow decode_categorical(const EncodedRow& enc) {
    FeatureRow row;
    const auto as_code = [](Scalar v, const char* what) {
        const int code = static_cast<int>(std::llround(v));
        if (std::abs(v - code) > 1e-9) {
            throw UnknownCategoryError(std::string("non-integer code for ") + what);
        }
        return code;
    };
    const int dn = as_code(enc.values[0], "DN");
    if (dn != 0 && dn != 1) throw UnknownCategoryError("DN code out of {0,1}");
    row.night = dn == 1;
    const int hl = as_code(enc.values[1], "HL");
    if (hl != 0 && hl != 1) throw UnknownCategoryError("HL code out of {0,1}");
    row.horizon = hl == 1;
    row.te = vehicle_kind_from_code(as_code(enc.values[2], "TE"));
    row.tp = vehicle_kind_from_code(as_code(enc.values[3], "TP"));
    row.wt = enc.values[4];
    row.ot = enc.values[5];
    row.nv = as_code(enc.values[6], "NV");
    row.se = enc.values[7];
    row.sp = enc.values[8];
    row.dsep = enc.values[9];
    row.d = enc.values[10];
    row.olr = enc.values[11];
    row.prec = enc.values[12];
    row.wind = enc.values[13];
    row.fog = enc.values[14];
    row.cls = enc.cls;
    return row;
}

ImputeReport impute_missing(RawTable& table) {
    ImputeReport report;
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t c = 0; c < table[r].size(); ++c) {
            if (!table[r][c]) {
                table[r][c] = 0.0;
                report.filled.emplace_back(r, c);
            }
        }
    }
    return report;
}

}  // namespace ovtsim
