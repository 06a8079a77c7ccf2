#include "ovtsim/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ovtsim/analytics.hpp"
#include "ovtsim/csv.hpp"
#include "ovtsim/detector.hpp"
#include "ovtsim/sampler.hpp"
#include "ovtsim/simengine.hpp"

namespace ovtsim {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 11> kNumericFeatures = {
    "WT", "OT", "NV", "SE", "SP", "DSEP", "D", "OLR", "PREC", "WIND", "FOG"};
constexpr std::array<int, 11> kNumericIndex = {4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};

std::string format_g(Scalar v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<FeatureRow> load_features(const fs::path& dir) {
    std::ifstream in(dir / "features.csv");
    if (!in) {
        throw std::runtime_error("features.csv not found in " + dir.string() +
                                 "; run the features stage first");
    }
    return read_features_csv(in);
}

std::vector<EncodedRow> encode_rows(const std::vector<FeatureRow>& rows) {
    std::vector<EncodedRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(encode_categorical(r));
    return out;
}

Column feature_column(const std::vector<EncodedRow>& rows, int index) {
    Column col(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        col[static_cast<Eigen::Index>(i)] = rows[i].values[static_cast<std::size_t>(index)];
    }
    return col;
}

}  // namespace

Config effective_config(const fs::path& dir) {
    const fs::path echo = dir / "config_echo.cfg";
    if (fs::exists(echo)) return load_config(echo);
    return Config{};
}

std::vector<SimulationLog> generate_logs(const Config& cfg, int sims, std::uint64_t seed,
                                         int threads) {
    std::vector<SimulationLog> logs(static_cast<std::size_t>(sims));
    const int workers = std::max(1, threads);
    auto work = [&](int first) {
        for (int i = first; i < sims; i += workers) {
            const int sim_id = i + 1;
            const ScenarioSpec spec =
                sample_scenario(scenario_seed(seed, sim_id), cfg, sim_id);
            logs[static_cast<std::size_t>(i)] = run(spec, cfg.engine);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return logs;
}

void stage_generate(const Config& cfg, const GenerateOptions& opts, const fs::path& dir) {
    fs::create_directories(dir);
    const std::vector<SimulationLog> logs = generate_logs(cfg, opts.sims, opts.seed,
                                                          opts.threads);
    ManifestEntries entries;
    for (const auto& log : logs) {
        write_simulation(log, dir, opts.carla_lane_ids, &entries);
        if (opts.traces) {
            std::ostringstream os;
            write_replay_trace(log, os);
            char name[48];
            std::snprintf(name, sizeof(name), "traces/sim_%05d.jsonl", log.sim_id);
            write_artifact(dir, name, os.str(), &entries);
        }
    }
    write_artifact(dir, "config_echo.cfg", config_echo(cfg), &entries);
    {
        ordered_json j;
        j["seed"] = opts.seed;
        j["sims"] = opts.sims;
        j["carla_lane_ids"] = opts.carla_lane_ids;
        write_artifact(dir, "generate.json", j.dump(2) + "\n", &entries);
    }
    merge_manifest(dir, entries);
}

void stage_label(const fs::path& dir, const std::optional<Config>& cfg_override) {
    const Config cfg = cfg_override ? *cfg_override : effective_config(dir);
    const std::vector<int> ids = list_sim_ids(dir);
    if (ids.empty()) throw std::runtime_error("no frame logs in " + dir.string());
    std::vector<Verdict> verdicts;
    verdicts.reserve(ids.size());
    for (int id : ids) {
        const SimulationLog log = read_simulation(dir, id);
        Verdict v;
        v.sim_id = id;
        v.trace = analyze(log, cfg.detector);
        v.label = classify(log, v.trace);
        verdicts.push_back(std::move(v));
    }
    std::ostringstream os;
    write_verdicts_json(verdicts, os);
    write_artifact(dir, "labels.json", os.str());
}

void stage_features(const fs::path& dir, const std::optional<Config>& cfg_override) {
    const Config cfg = cfg_override ? *cfg_override : effective_config(dir);
    const fs::path labels_path = dir / "labels.json";
    if (!fs::exists(labels_path)) {
        throw std::runtime_error("labels.json not found; run the label stage first");
    }
    std::ifstream labels_in(labels_path);
    const std::vector<Verdict> verdicts = read_verdicts_json(labels_in);
    std::map<int, ClassLabel> label_of;
    for (const auto& v : verdicts) label_of[v.sim_id] = v.label;

    const std::vector<int> ids = list_sim_ids(dir);
    std::vector<SimulationLog> logs;
    std::vector<FeatureRow> rows;
    logs.reserve(ids.size());
    for (int id : ids) {
        logs.push_back(read_simulation(dir, id));
        const SimulationLog& log = logs.back();
        const auto it = label_of.find(id);
        if (it == label_of.end()) {
            throw std::runtime_error("labels.json has no entry for simulation " +
                                     std::to_string(id));
        }
        const ManeuverTrace trace = analyze(log, cfg.detector);
        rows.push_back(feature_row(log, trace, it->second));
    }

    std::ostringstream os;
    write_features_csv(rows, os);
    ManifestEntries entries;
    write_artifact(dir, "features.csv", os.str(), &entries);

    std::vector<const SimulationLog*> log_ptrs;
    log_ptrs.reserve(logs.size());
    for (const auto& log : logs) log_ptrs.push_back(&log);
    export_relational(log_ptrs, rows, dir / "relational");
    for (const char* name : {"simulations.csv", "frames.csv", "vehicles.csv",
                             "ego_vehicle.csv", "weather.csv"}) {
        entries.emplace_back(std::string("relational/") + name,
                             slurp(dir / "relational" / name));
    }
    merge_manifest(dir, entries);
}

void stage_stats(const fs::path& dir, int n_bins) {
    const std::vector<FeatureRow> rows = load_features(dir);
    const std::vector<EncodedRow> encoded = encode_rows(rows);

    CsvTable stats;
    stats.header = {"feature", "class", "n", "min", "mean", "max", "sigma"};
    for (const auto& s : class_stats(rows)) {
        stats.rows.push_back({s.feature, std::string(to_string(s.cls)), std::to_string(s.n),
                              format_g(s.min), format_g(s.mean), format_g(s.max),
                              format_g(s.sigma)});
    }

    CsvTable hist;
    hist.header = {"feature", "bin_lo", "bin_hi", "count"};
    CsvTable box;
    box.header = {"feature", "q1", "median", "q3", "whisker_lo", "whisker_hi", "outliers"};
    for (std::size_t f = 0; f < kNumericFeatures.size(); ++f) {
        const Column col = feature_column(encoded, kNumericIndex[f]);
        const HistogramResult h = histogram(col, n_bins);
        for (int b = 0; b < h.counts.size(); ++b) {
            hist.rows.push_back({kNumericFeatures[f], format_g(h.edges[b]),
                                 format_g(h.edges[b + 1]), std::to_string(h.counts[b])});
        }
        // Box statistics on the min-max scaled column, as plotted.
        const BoxStats bs = boxplot_stats(minmax_scale(col));
        std::string outliers;
        for (std::size_t i = 0; i < bs.outliers.size(); ++i) {
            if (i) outliers += ';';
            outliers += format_g(bs.outliers[i]);
        }
        box.rows.push_back({kNumericFeatures[f], format_g(bs.q1), format_g(bs.median),
                            format_g(bs.q3), format_g(bs.whisker_lo),
                            format_g(bs.whisker_hi), outliers});
    }

    ManifestEntries entries;
    const auto emit = [&](const char* name, const CsvTable& t) {
        std::ostringstream os;
        write_csv(os, t);
        write_artifact(dir, name, os.str(), &entries);
    };
    emit("stats.csv", stats);
    emit("hist.csv", hist);
    emit("box.csv", box);
    merge_manifest(dir, entries);
}

void stage_correlate(const fs::path& dir, bool cluster) {
    const std::vector<FeatureRow> rows = load_features(dir);
    const std::vector<EncodedRow> encoded = encode_rows(rows);

    std::vector<std::string> names(kFeatureColumns.begin(), kFeatureColumns.end());
    std::vector<Column> columns;
    std::vector<ColumnKind> kinds;
    for (int i = 0; i < 15; ++i) {
        columns.push_back(feature_column(encoded, i));
        kinds.push_back(i < 4 ? ColumnKind::CATEGORICAL : ColumnKind::NUMERIC);
    }
    Column cls(static_cast<Eigen::Index>(encoded.size()));
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        cls[static_cast<Eigen::Index>(i)] = static_cast<Scalar>(encoded[i].cls);
    }
    columns.push_back(cls);
    kinds.push_back(ColumnKind::CATEGORICAL);

    const AssociationMatrix assoc = associations(names, columns, kinds, cluster);

    const auto emit_matrix = [&](const char* name, const Eigen::MatrixXd& m,
                                 ManifestEntries& entries) {
        CsvTable t;
        t.header.push_back("feature");
        for (const auto& label : assoc.labels) t.header.push_back(label);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::vector<std::string> row = {assoc.labels[static_cast<std::size_t>(i)]};
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                row.push_back(std::isnan(m(i, j)) ? "" : format_g(m(i, j)));
            }
            t.rows.push_back(std::move(row));
        }
        std::ostringstream os;
        write_csv(os, t);
        write_artifact(dir, name, os.str(), &entries);
    };
    ManifestEntries entries;
    emit_matrix("assoc.csv", assoc.coeff, entries);
    emit_matrix("pvalues.csv", assoc.p_values, entries);
    merge_manifest(dir, entries);
}

void stage_sbs(const fs::path& dir) {
    const std::vector<FeatureRow> rows = load_features(dir);
    const std::vector<EncodedRow> encoded = encode_rows(rows);
    if (rows.empty()) throw EmptyDatasetError("sbs needs a non-empty features dataset");

    Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), 15);
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        for (int f = 0; f < 15; ++f) {
            features(static_cast<Eigen::Index>(i), f) =
                encoded[i].values[static_cast<std::size_t>(f)];
        }
        labels[i] = static_cast<int>(encoded[i].cls);
    }
    const auto evaluator = [&](const std::vector<int>& subset) {
        return nearest_centroid_loo_accuracy(features, labels, subset);
    };
    const SbsResult res = sbs_rank(15, evaluator);

    CsvTable t;
    t.header = {"rank", "feature", "accuracy"};
    for (std::size_t r = 0; r < res.ranked.size(); ++r) {
        t.rows.push_back({std::to_string(r + 1),
                          kFeatureColumns[static_cast<std::size_t>(res.ranked[r])],
                          format_g(res.ranked_accuracy[r])});
    }
    std::ostringstream os;
    write_csv(os, t);
    write_artifact(dir, "sbs.csv", os.str());
}

std::vector<std::string> stage_validate(const fs::path& dir) {
    return validate_manifest(dir);
}

void stage_replay_trace(const fs::path& dir, std::optional<int> sim_id) {
    std::vector<int> ids;
    if (sim_id) ids.push_back(*sim_id);
    else ids = list_sim_ids(dir);
    if (ids.empty()) throw std::runtime_error("no frame logs in " + dir.string());
    ManifestEntries entries;
    for (int id : ids) {
        const SimulationLog log = read_simulation(dir, id);
        std::ostringstream os;
        write_replay_trace(log, os);
        char name[48];
        std::snprintf(name, sizeof(name), "traces/sim_%05d.jsonl", id);
        write_artifact(dir, name, os.str(), &entries);
    }
    merge_manifest(dir, entries);
}

std::vector<FeatureRow> rows_from_logs(const std::vector<SimulationLog>& logs,
                                       const Config& cfg) {
    std::vector<FeatureRow> rows;
    rows.reserve(logs.size());
    for (const auto& log : logs) {
        const ManeuverTrace trace = analyze(log, cfg.detector);
        rows.push_back(feature_row(log, trace, classify(log, trace)));
    }
    return rows;
}

}  // namespace ovtsim
