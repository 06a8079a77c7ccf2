#include <cmath>

#include "doctest.h"
#include "ovtsim/types.hpp"

using namespace ovtsim;

TEST_CASE("lane_of maps y bands to 1-based lanes") {
    CHECK(lane_of(240.0) == 1);
    CHECK(lane_of(238.0) == 1);  // lower boundary, half-open band
    CHECK(lane_of(257.9) == 5);
    CHECK(lane_of(242.0) == 2);
    CHECK(lane_of(246.0) == 3);
    CHECK_THROWS_AS(lane_of(258.0), OutOfRoadError);
    CHECK_THROWS_AS(lane_of(237.99), OutOfRoadError);
}

TEST_CASE("lane_center hits band midpoints") {
    CHECK(lane_center(1) == doctest::Approx(240.0));
    CHECK(lane_center(3) == doctest::Approx(248.0));
    CHECK(lane_center(5) == doctest::Approx(256.0));
    CHECK_THROWS_AS(lane_center(0), BadLaneError);
    CHECK_THROWS_AS(lane_center(6), BadLaneError);
}

TEST_CASE("lane_of and lane_center are consistent across the road") {
    for (Scalar y = 238.0; y < 258.0; y += 0.1) {
        const int lane = lane_of(y);
        CHECK(lane_of(lane_center(lane)) == lane);
        CHECK(lane_center(lane) >= 238.0 + 4.0 * (lane - 1));
        CHECK(lane_center(lane) < 238.0 + 4.0 * lane);
    }
}

TEST_CASE("vehicle kind codes are a bijection on 0..6") {
    for (int code = 0; code < kNumVehicleKinds; ++code) {
        const VehicleKind kind = vehicle_kind_from_code(code);
        CHECK(encode_vehicle_kind(kind) == code);
        CHECK(vehicle_kind_from_string(to_string(kind)) == kind);
    }
    CHECK(encode_vehicle_kind(VehicleKind::S) == 0);
    CHECK(encode_vehicle_kind(VehicleKind::B) == 6);
    CHECK(encode_vehicle_kind(VehicleKind::MC) == 5);
    CHECK_THROWS_AS(vehicle_kind_from_code(7), UnknownCategoryError);
    CHECK_THROWS_AS(vehicle_kind_from_string("X"), UnknownCategoryError);
    CHECK_FALSE(ego_capable(VehicleKind::MC));
    CHECK_FALSE(ego_capable(VehicleKind::B));
    CHECK(ego_capable(VehicleKind::T));
}

TEST_CASE("day/night and yes/no codecs") {
    CHECK(encode_day_night("Night") == 1);
    CHECK(encode_day_night("Day") == 0);
    CHECK(encode_yes_no("No") == 0);
    CHECK(encode_yes_no("Yes") == 1);
    CHECK(day_night_from_code(1) == "Night");
    CHECK(yes_no_from_code(0) == "No");
    CHECK_THROWS_AS(encode_day_night("Dusk"), UnknownCategoryError);
    CHECK_THROWS_AS(encode_yes_no("Maybe"), UnknownCategoryError);
}

TEST_CASE("class labels round-trip through their names") {
    for (int c = 0; c < kNumClassLabels; ++c) {
        const ClassLabel label = static_cast<ClassLabel>(c);
        CHECK(class_label_from_string(to_string(label)) == label);
    }
    CHECK(to_string(ClassLabel::Success_L) == "Success_L");
    CHECK_THROWS_AS(class_label_from_string("Success"), UnknownCategoryError);
}

TEST_CASE("clock timestamps stay on the 0.05 grid") {
    SimClock clock;
    for (int f = 0; f <= 400; ++f) {
        clock.frame = f;
        CHECK(std::abs(clock.timestamp() - 0.05 * f) < 1e-12);
        if (f % 20 == 0) CHECK(clock.timestamp() == static_cast<Scalar>(f / 20));
    }
    clock.frame = 70;
    CHECK(clock.timestamp() == 3.5);
    CHECK(clock.frame_count() == 401);
    CHECK_THROWS_AS(grid_timestamp(1, 0.0333), BadDurationError);
}

TEST_CASE("quantize2 snaps to hundredths") {
    CHECK(quantize2(3.14159) == 3.14);
    CHECK(quantize2(-0.001) == 0.0);
    CHECK(quantize2(20.0) == 20.0);
    CHECK(quantize2(0.05) == 0.05);
}
