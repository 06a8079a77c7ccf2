#ifndef OVTSIM_FEATURES_HPP
#define OVTSIM_FEATURES_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ovtsim/detector.hpp"
#include "ovtsim/simengine.hpp"
#include "ovtsim/types.hpp"

namespace ovtsim {

// Column order of the features dataset.
extern const std::array<std::string, 16> kFeatureColumns;

struct FeatureRow {
    bool night = false;       // DN
    bool horizon = false;     // HL
    VehicleKind te = VehicleKind::S;
    VehicleKind tp = VehicleKind::S;
    Scalar wt = 0;
    Scalar ot = 0;
    int nv = 0;
    Scalar se = 0;
    Scalar sp = 0;
    Scalar dsep = 0;
    Scalar d = 0;
    Scalar olr = 0;
    Scalar prec = 0;
    Scalar wind = 0;
    Scalar fog = 0;
    ClassLabel cls = ClassLabel::No_attempt;
};

struct StaticFields {
    bool night = false;
    bool horizon = false;
    VehicleKind te = VehicleKind::S;
    VehicleKind tp = VehicleKind::S;
    Scalar wt = 0;
    Scalar ot = 0;
    int nv = 0;
};

struct DynamicFields {
    Scalar se = 0;
    Scalar sp = 0;
    Scalar dsep = 0;
    Scalar d = 0;
    Scalar olr = 0;
    Scalar prec = 0;
    Scalar wind = 0;
    Scalar fog = 0;
};

// Nearest vehicle ahead of the ego in its lane at a frame; -1 if none.
int resolve_target(const SimulationLog& log, int frame);

// Percent of the observation window covered by vehicles in a lane.
Scalar occupancy_rate(const FrameRecord& rec, int lane);

StaticFields extract_static(const SimulationLog& log, const ManeuverTrace& trace,
                            ClassLabel label);

// Dynamic fields at one frame instant; throws BadInstantError off the grid.
DynamicFields extract_dynamic_at(const SimulationLog& log, Scalar t, int target_id);

// Attempts sample the dynamics at the manoeuvre start; No_attempt rows
// average every frame with the per-frame nearest preceding vehicle.
FeatureRow feature_row(const SimulationLog& log, const ManeuverTrace& trace, ClassLabel label);

// Numeric view of a row: DN,HL,TE,TP,WT,OT,NV,SE,SP,DSEP,D,OLR,PREC,WIND,FOG.
struct EncodedRow {
    std::array<Scalar, 15> values{};
    ClassLabel cls = ClassLabel::No_attempt;
};

EncodedRow encode_categorical(const FeatureRow& row);
FeatureRow decode_categorical(const EncodedRow& row);

// Missing numeric cells become 0; returns (row, col) of every fill.
using RawTable = std::vector<std::vector<std::optional<Scalar>>>;
struct ImputeReport {
    std::vector<std::pair<std::size_t, std::size_t>> filled;
};
ImputeReport impute_missing(RawTable& table);

}  // namespace ovtsim

#endif  // OVTSIM_FEATURES_HPP
