#ifndef OVTSIM_TYPES_HPP
#define OVTSIM_TYPES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "ovtsim/errors.hpp"

namespace ovtsim {

using Scalar = double;

// One-way highway segment: 5 parallel lanes along +x, each lane occupying a
// 4 m band of y starting at 238. Reported drivable width is 3.5 m with a
// 0.5 m shoulder on each side of the roadway.
struct LaneGeometry {
    Scalar x_min = 320.0;
    Scalar x_max = 450.0;
    Scalar lane_band_width = 4.0;
    Scalar first_band_y = 238.0;
    int n_lanes = 5;
    Scalar lane_width = 3.5;  // LW as logged
    Scalar shoulder_width = 0.5;

    Scalar window_length() const { return x_max - x_min; }
    Scalar y_min() const { return first_band_y; }
    Scalar y_max() const { return first_band_y + lane_band_width * n_lanes; }
};

inline constexpr int kNumLanes = 5;

// Lane index for a y position. Bands are half-open [lo, hi), 1-based.
int lane_of(Scalar y);

// y center of a lane band.
Scalar lane_center(int lane);

enum class VehicleKind : int { S = 0, M = 1, L = 2, V = 3, T = 4, MC = 5, B = 6 };

struct KindDims {
    Scalar length = 0;
    Scalar width = 0;
    Scalar height = 0;
};

inline constexpr int kNumVehicleKinds = 7;

std::string_view to_string(VehicleKind kind);
VehicleKind vehicle_kind_from_string(std::string_view name);
KindDims default_dims(VehicleKind kind);

// S..B map to 0..6.
int encode_vehicle_kind(VehicleKind kind);
VehicleKind vehicle_kind_from_code(int code);

// Bicycles and motorcycles never drive the ego role.
bool ego_capable(VehicleKind kind);

enum class ClassLabel : int {
    Success_L = 0,
    Success_I = 1,
    Unsuccess_col = 2,
    Unsuccess_ncol = 3,
    No_attempt = 4,
};

inline constexpr int kNumClassLabels = 5;

std::string_view to_string(ClassLabel label);
ClassLabel class_label_from_string(std::string_view name);

struct WeatherPreset {
    std::string name;
    bool is_night = false;
    bool horizon_line = false;
    Scalar cloudiness = 0;
    Scalar precipitation = 0;
    Scalar wind = 0;
    Scalar fog = 0;
};

// Fixed-step clock. Timestamps live on the dt grid.
struct SimClock {
    Scalar dt = 0.05;
    Scalar duration = 20.0;
    int frame = 0;

    Scalar timestamp() const;
    int frame_count() const;  // frames 0..duration/dt inclusive
};

// Canonical grid timestamp: the double closest to the decimal frame*dt.
// dt must be a whole number of hundredths of a second.
Scalar grid_timestamp(int frame, Scalar dt);

// Nearest hundredth, as the double a CSV round-trip produces.
Scalar quantize2(Scalar v);

// Categorical codecs shared by the feature pipeline.
int encode_day_night(std::string_view v);  // Day -> 0, Night -> 1
int encode_yes_no(std::string_view v);     // No -> 0, Yes -> 1
std::string_view day_night_from_code(int code);
std::string_view yes_no_from_code(int code);

}  // namespace ovtsim

#endif  // OVTSIM_TYPES_HPP
