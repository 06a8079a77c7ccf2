#ifndef OVTSIM_IO_HPP
#define OVTSIM_IO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ovtsim/detector.hpp"
#include "ovtsim/features.hpp"
#include "ovtsim/simengine.hpp"

namespace ovtsim {

// ---- frame logs (one CSV per simulation) --------------------------------

extern const std::array<std::string, 22> kFrameLogColumns;

// carla_lane_ids maps lanes 1..5 to -3..-7 on output; the reader accepts
// either convention.
void write_frame_log(const SimulationLog& log, std::ostream& out,
                     bool carla_lane_ids = false);
SimulationLog read_frame_log(std::istream& in);

// Scenario sidecar carrying what the frame schema cannot: seed, preset name,
// vehicle kinds, colours, and target speeds.
void write_log_meta(const SimulationLog& log, std::ostream& out);
void apply_log_meta(SimulationLog& log, std::istream& in);

using ManifestEntries = std::vector<std::pair<std::string, std::string>>;

// frames/sim_%05d.csv + scenarios/sim_%05d.json under a dataset directory.
// With manifest_acc the (path, content) pairs are collected for one batched
// manifest merge instead of rewriting manifest.json per file.
void write_simulation(const SimulationLog& log, const std::filesystem::path& dir,
                      bool carla_lane_ids = false, ManifestEntries* manifest_acc = nullptr);
SimulationLog read_simulation(const std::filesystem::path& dir, int sim_id);
std::vector<int> list_sim_ids(const std::filesystem::path& dir);

// ---- features dataset ----------------------------------------------------

void write_features_csv(const std::vector<FeatureRow>& rows, std::ostream& out);
std::vector<FeatureRow> read_features_csv(std::istream& in);

// ---- relational export ----------------------------------------------------

// Five tables under dir: simulations, frames, vehicles, ego_vehicle, weather.
void export_relational(const std::vector<const SimulationLog*>& logs,
                       const std::vector<FeatureRow>& rows,
                       const std::filesystem::path& dir);
// Foreign-key audit of an exported set; throws ReferentialError.
void check_relational(const std::filesystem::path& dir);

// ---- replay trace ----------------------------------------------------------

// JSON Lines: one object per frame with per-vehicle x/y/lane/speed.
void write_replay_trace(const SimulationLog& log, std::ostream& out);

// ---- verdicts --------------------------------------------------------------

struct Verdict {
    int sim_id = 0;
    ClassLabel label = ClassLabel::No_attempt;
    ManeuverTrace trace;
};

void write_verdicts_json(const std::vector<Verdict>& verdicts, std::ostream& out);
std::vector<Verdict> read_verdicts_json(std::istream& in);

// ---- manifest ---------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Writes text and records (path, bytes, hash) into manifest.json, either
// immediately or into an accumulator for a later merge_manifest call.
void write_artifact(const std::filesystem::path& dir, const std::string& rel_path,
                    const std::string& content, ManifestEntries* manifest_acc = nullptr);
void merge_manifest(const std::filesystem::path& dir, const ManifestEntries& files);
// Empty result means every artifact matches its recorded hash.
std::vector<std::string> validate_manifest(const std::filesystem::path& dir);

}  // namespace ovtsim

#endif  // OVTSIM_IO_HPP
