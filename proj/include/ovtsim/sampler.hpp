#ifndef OVTSIM_SAMPLER_HPP
#define OVTSIM_SAMPLER_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ovtsim/config.hpp"
#include "ovtsim/types.hpp"

namespace ovtsim {

// splitmix64 finalizer; also used to derive per-simulation stream seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t scenario_seed(std::uint64_t master_seed, int sim_id);

// Deterministic draws on top of mt19937_64. The standard distributions are
// implementation-defined, so the bounded draws are done by hand.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    Scalar next_unit() {
        return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53;
    }

    // inclusive bounds
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    Scalar uniform_real(Scalar lo, Scalar hi) { return lo + (hi - lo) * next_unit(); }

    // -1 or +1
    int sign() { return (next_u64() & 1u) ? 1 : -1; }

private:
    std::mt19937_64 gen_;
};

struct VehicleSpawn {
    VehicleKind kind = VehicleKind::S;
    std::string colour;
    Scalar x0 = 0;
    int lane0 = 1;
    int target_speed_kmh = 0;
    KindDims dims;
};

struct ScenarioSpec {
    int sim_id = 1;
    std::uint64_t seed = 0;
    std::vector<VehicleSpawn> vehicles;
    int ego_index = 0;
    WeatherPreset preset;
    Scalar duration = 20.0;
    Scalar dt = 0.05;
    int mv_limit_kmh = 90;
};

extern const std::vector<std::string> kVehicleColours;

// The 9 built-in weather presets, stable order.
const std::vector<WeatherPreset>& preset_catalog();
const WeatherPreset& preset_by_name(std::string_view name);

ScenarioSpec sample_scenario(std::uint64_t seed, const Config& cfg = {}, int sim_id = 1);

// Empty report iff all spec invariants hold.
std::vector<std::string> validate_scenario(const ScenarioSpec& spec);

}  // namespace ovtsim

#endif  // OVTSIM_SAMPLER_HPP
