#include "ovtsim/types.hpp"

#include <cmath>

namespace ovtsim {

namespace {
constexpr LaneGeometry kGeometry{};

constexpr std::array<std::string_view, kNumVehicleKinds> kKindNames = {
    "S", "M", "L", "V", "T", "MC", "B"};

// L x W x H per kind, meters.
constexpr std::array<KindDims, kNumVehicleKinds> kDefaultDims = {{
    {4.0, 1.8, 1.5},  // S
    {4.6, 1.9, 1.6},  // M
    {5.0, 2.0, 1.8},  // L
    {5.4, 2.0, 2.2},  // V
    {7.5, 2.5, 3.5},  // T
    {2.2, 0.8, 1.4},  // MC
    {1.8, 0.6, 1.2},  // B
}};

constexpr std::array<std::string_view, kNumClassLabels> kClassNames = {
    "Success_L", "Success_I", "Unsuccess_col", "Unsuccess_ncol", "No_attempt"};
}  // namespace

int lane_of(Scalar y) {
    if (!(y >= kGeometry.y_min() && y < kGeometry.y_max())) {
        throw OutOfRoadError("y position " + std::to_string(y) + " is off the roadway");
    }
    return 1 + static_cast<int>(std::floor((y - kGeometry.first_band_y) /
                                           kGeometry.lane_band_width));
}

Scalar lane_center(int lane) {
    if (lane < 1 || lane > kGeometry.n_lanes) {
        throw BadLaneError("lane index " + std::to_string(lane) + " out of 1..5");
    }
    return kGeometry.first_band_y + kGeometry.lane_band_width * (lane - 1) +
           kGeometry.lane_band_width / 2;
}

std::string_view to_string(VehicleKind kind) {
    return kKindNames[static_cast<int>(kind)];
}

VehicleKind vehicle_kind_from_string(std::string_view name) {
    for (int i = 0; i < kNumVehicleKinds; ++i) {
        if (kKindNames[i] == name) return static_cast<VehicleKind>(i);
    }
    throw UnknownCategoryError("unknown vehicle kind: " + std::string(name));
}

KindDims default_dims(VehicleKind kind) {
    return kDefaultDims[static_cast<int>(kind)];
}

int encode_vehicle_kind(VehicleKind kind) { return static_cast<int>(kind); }

VehicleKind vehicle_kind_from_code(int code) {
    if (code < 0 || code >= kNumVehicleKinds) {
        throw UnknownCategoryError("vehicle kind code " + std::to_string(code) +
                                   " out of 0..6");
    }
    return static_cast<VehicleKind>(code);
}

bool ego_capable(VehicleKind kind) {
    return kind != VehicleKind::MC && kind != VehicleKind::B;
}

std::string_view to_string(ClassLabel label) {
    return kClassNames[static_cast<int>(label)];
}

ClassLabel class_label_from_string(std::string_view name) {
    for (int i = 0; i < kNumClassLabels; ++i) {
        if (kClassNames[i] == name) return static_cast<ClassLabel>(i);
    }
    throw UnknownCategoryError("unknown class label: " + std::string(name));
}

Scalar SimClock::timestamp() const { return grid_timestamp(frame, dt); }

int SimClock::frame_count() const {
    return static_cast<int>(std::llround(duration / dt)) + 1;
}

Scalar grid_timestamp(int frame, Scalar dt) {
    const long long hundredths = std::llround(dt * 100.0);
    if (hundredths <= 0 || std::abs(dt * 100.0 - static_cast<Scalar>(hundredths)) > 1e-9) {
        throw BadDurationError("dt must be a positive multiple of 0.01 s");
    }
    return static_cast<Scalar>(hundredths * frame) / 100.0;
}

Scalar quantize2(Scalar v) {
    const Scalar q = std::round(v * 100.0);
    if (q == 0.0) return 0.0;  // avoid negative zero
    return q / 100.0;
}

int encode_day_night(std::string_view v) {
    if (v == "Day") return 0;
    if (v == "Night") return 1;
    throw UnknownCategoryError("unknown DN value: " + std::string(v));
}

int encode_yes_no(std::string_view v) {
    if (v == "No") return 0;
    if (v == "Yes") return 1;
    throw UnknownCategoryError("unknown Yes/No value: " + std::string(v));
}

std::string_view day_night_from_code(int code) {
    if (code == 0) return "Day";
    if (code == 1) return "Night";
    throw UnknownCategoryError("DN code " + std::to_string(code) + " out of {0,1}");
}

std::string_view yes_no_from_code(int code) {
    if (code == 0) return "No";
    if (code == 1) return "Yes";
    throw UnknownCategoryError("Yes/No code " + std::to_string(code) + " out of {0,1}");
}

}  // namespace ovtsim
