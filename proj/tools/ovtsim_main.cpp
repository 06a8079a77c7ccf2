#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ovtsim/pipeline.hpp"

namespace {

ovtsim::Config load_cfg(const std::string& config_path, const std::filesystem::path& out_dir,
                        bool prefer_echo) {
    if (!config_path.empty()) return ovtsim::load_config(config_path);
    if (prefer_echo) return ovtsim::effective_config(out_dir);
    return ovtsim::Config{};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic highway overtaking dataset generator and analytics"};
    app.require_subcommand(1);

    std::string out_dir = "dataset";
    std::string config_path;
    int sims = 300;
    std::uint64_t seed = 42;
    int threads = 1;
    bool carla_lane_ids = false;
    bool traces = false;
    int n_bins = 10;
    bool cluster = false;
    int replay_sim = -1;

    auto* generate = app.add_subcommand("generate", "Sample and simulate scenarios");
    generate->add_option("--sims", sims, "Number of simulations");
    generate->add_option("--seed", seed, "Master seed");
    generate->add_option("--config", config_path, "Config file (flat key = value)");
    generate->add_option("--out", out_dir, "Output directory");
    generate->add_option("--threads", threads, "Worker threads");
    generate->add_flag("--carla-lane-ids", carla_lane_ids,
                       "Write lane ids as -3..-7 instead of 1..5");
    generate->add_flag("--traces", traces, "Also write replay traces");

    auto* label = app.add_subcommand("label", "Classify each simulation");
    label->add_option("--out", out_dir, "Dataset directory");
    label->add_option("--config", config_path, "Config file override");

    auto* features = app.add_subcommand("features", "Extract the features dataset");
    features->add_option("--out", out_dir, "Dataset directory");
    features->add_option("--config", config_path, "Config file override");

    auto* stats = app.add_subcommand("stats", "Per-class summaries, histograms, box stats");
    stats->add_option("--out", out_dir, "Dataset directory");
    stats->add_option("--bins", n_bins, "Histogram bins");

    auto* correlate = app.add_subcommand("correlate", "Association matrix with p-values");
    correlate->add_option("--out", out_dir, "Dataset directory");
    correlate->add_flag("--cluster", cluster, "Group similar columns");

    auto* sbs = app.add_subcommand("sbs", "Backward-elimination feature ranking");
    sbs->add_option("--out", out_dir, "Dataset directory");

    auto* validate = app.add_subcommand("validate", "Check artifacts against the manifest");
    validate->add_option("--out", out_dir, "Dataset directory");

    auto* replay = app.add_subcommand("replay-trace", "Emit JSON Lines replay traces");
    replay->add_option("--out", out_dir, "Dataset directory");
    replay->add_option("--sim", replay_sim, "Single simulation id");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (generate->parsed()) {
            ovtsim::GenerateOptions opts;
            opts.sims = sims;
            opts.seed = seed;
            opts.threads = threads;
            opts.carla_lane_ids = carla_lane_ids;
            opts.traces = traces;
            ovtsim::stage_generate(load_cfg(config_path, out_dir, false), opts, out_dir);
            std::cout << "generated " << sims << " simulations into " << out_dir << "\n";
        } else if (label->parsed()) {
            std::optional<ovtsim::Config> cfg_override;
            if (!config_path.empty()) cfg_override = ovtsim::load_config(config_path);
            ovtsim::stage_label(out_dir, cfg_override);
            std::cout << "wrote labels.json\n";
        } else if (features->parsed()) {
            std::optional<ovtsim::Config> cfg_override;
            if (!config_path.empty()) cfg_override = ovtsim::load_config(config_path);
            ovtsim::stage_features(out_dir, cfg_override);
            std::cout << "wrote features.csv and relational tables\n";
        } else if (stats->parsed()) {
            ovtsim::stage_stats(out_dir, n_bins);
            std::cout << "wrote stats.csv, hist.csv, box.csv\n";
        } else if (correlate->parsed()) {
            ovtsim::stage_correlate(out_dir, cluster);
            std::cout << "wrote assoc.csv, pvalues.csv\n";
        } else if (sbs->parsed()) {
            ovtsim::stage_sbs(out_dir);
            std::cout << "wrote sbs.csv\n";
        } else if (validate->parsed()) {
            const auto problems = ovtsim::stage_validate(out_dir);
            if (!problems.empty()) {
                for (const auto& p : problems) std::cerr << p << "\n";
                return 1;
            }
            std::cout << "manifest ok\n";
        } else if (replay->parsed()) {
            std::optional<int> sim;
            if (replay_sim > 0) sim = replay_sim;
            ovtsim::stage_replay_trace(out_dir, sim);
            std::cout << "wrote replay traces\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
