#ifndef OVTSIM_PIPELINE_HPP
#define OVTSIM_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ovtsim/config.hpp"
#include "ovtsim/features.hpp"
#include "ovtsim/io.hpp"

namespace ovtsim {

struct GenerateOptions {
    int sims = 300;
    std::uint64_t seed = 42;
    int threads = 1;
    bool carla_lane_ids = false;
    bool traces = false;
};

// generate: sample + simulate, write frame logs, sidecars, and the manifest.
// Output is byte-identical for a fixed (seed, config) at any thread count.
void stage_generate(const Config& cfg, const GenerateOptions& opts,
                    const std::filesystem::path& dir);

// label: frame logs -> labels.json with class, stage times, and violations.
// cfg_override replaces the echoed generate-time configuration.
void stage_label(const std::filesystem::path& dir,
                 const std::optional<Config>& cfg_override = {});

// features: frame logs + labels.json -> features.csv and relational tables.
void stage_features(const std::filesystem::path& dir,
                    const std::optional<Config>& cfg_override = {});

// stats: features.csv -> stats.csv, hist.csv, box.csv.
void stage_stats(const std::filesystem::path& dir, int n_bins = 10);

// correlate: features.csv -> assoc.csv + pvalues.csv.
void stage_correlate(const std::filesystem::path& dir, bool cluster = false);

// sbs: features.csv -> sbs.csv (rank, feature, accuracy ladder).
void stage_sbs(const std::filesystem::path& dir);

// validate: recompute manifest hashes; returns the mismatch list.
std::vector<std::string> stage_validate(const std::filesystem::path& dir);

// replay-trace: frame logs -> traces/sim_%05d.jsonl (all sims or one).
void stage_replay_trace(const std::filesystem::path& dir, std::optional<int> sim_id = {});

// Loads out/config_echo.cfg when present (written by generate) so later
// stages run with the generating configuration.
Config effective_config(const std::filesystem::path& dir);

// In-memory helpers shared by the CLI and the test suites.
std::vector<SimulationLog> generate_logs(const Config& cfg, int sims, std::uint64_t seed,
                                         int threads = 1);
std::vector<FeatureRow> rows_from_logs(const std::vector<SimulationLog>& logs,
                                       const Config& cfg);

}  // namespace ovtsim

#endif  // OVTSIM_PIPELINE_HPP
