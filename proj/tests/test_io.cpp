#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ovtsim/csv.hpp"
#include "ovtsim/detector.hpp"
#include "ovtsim/io.hpp"
#include "ovtsim/pipeline.hpp"
#include "ovtsim/sampler.hpp"

using namespace ovtsim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ovtsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool logs_equal(const SimulationLog& a, const SimulationLog& b) {
    if (a.frames.size() != b.frames.size()) return false;
    for (std::size_t f = 0; f < a.frames.size(); ++f) {
        const FrameRecord& ra = a.frames[f];
        const FrameRecord& rb = b.frames[f];
        if (ra.sim != rb.sim || ra.frame != rb.frame || ra.ts != rb.ts ||
            ra.id_ego != rb.id_ego || ra.mv_kmh != rb.mv_kmh ||
            ra.right_line != rb.right_line || ra.left_line != rb.left_line ||
            ra.lane_width != rb.lane_width || ra.lane_width_right != rb.lane_width_right ||
            ra.lane_width_left != rb.lane_width_left ||
            ra.collision_with != rb.collision_with ||
            ra.precipitation != rb.precipitation || ra.fog != rb.fog ||
            ra.wind != rb.wind || ra.night != rb.night ||
            ra.horizon_line != rb.horizon_line || ra.ov != rb.ov ||
            ra.vehicles.size() != rb.vehicles.size()) {
            return false;
        }
        for (std::size_t v = 0; v < ra.vehicles.size(); ++v) {
            const VehicleFrame& va = ra.vehicles[v];
            const VehicleFrame& vb = rb.vehicles[v];
            if (va.id != vb.id || va.x != vb.x || va.y != vb.y || va.lane != vb.lane ||
                va.speed_kmh != vb.speed_kmh || va.accel_mps2 != vb.accel_mps2 ||
                va.dir != vb.dir || va.dims.length != vb.dims.length ||
                va.dims.width != vb.dims.width || va.dims.height != vb.dims.height) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("csv cells with commas and quotes survive a round trip") {
    CsvTable table;
    table.header = {"a", "b"};
    table.rows = {{"(1,2);(3,4)", "plain"}, {"say \"hi\"", ""}};
    std::stringstream ss;
    write_csv(ss, table);
    const CsvTable back = read_csv(ss);
    CHECK(back.header == table.header);
    CHECK(back.rows == table.rows);
}

TEST_CASE("csv parse errors carry coordinates") {
    std::stringstream ss("a,b\n1,\"unterminated\n");
    try {
        read_csv(ss);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row >= 1);
    }
}

TEST_CASE("trimmed formatting drops only trailing zeros") {
    CHECK(format_trimmed2(3.5) == "3.5");
    CHECK(format_trimmed2(20.0) == "20");
    CHECK(format_trimmed2(0.05) == "0.05");
    CHECK(format_trimmed2(0.0) == "0");
    CHECK(format_fixed2(66.0) == "66.00");
}

TEST_CASE("the checked-in frame-70 fixture row parses to the documented values") {
    std::ifstream in(std::string(OVTSIM_TEST_DATA_DIR) + "/table7_frame.csv");
    REQUIRE(in.good());
    const SimulationLog log = read_frame_log(in);
    REQUIRE(log.frames.size() == 1);
    const FrameRecord& rec = log.frames.front();
    CHECK(rec.sim == 1);
    CHECK(rec.frame == 70);
    CHECK(rec.ts == 3.5);
    CHECK(rec.id_ego == 488);
    REQUIRE(rec.collision_with.has_value());
    CHECK(*rec.collision_with == 489);
    CHECK(rec.ov == 0);
    CHECK(rec.mv_kmh == 90);
    CHECK(rec.right_line == "Solid");
    CHECK(rec.left_line == "Broken");
    CHECK(rec.lane_width == 3.5);
    CHECK(rec.lane_width_right == 0.5);
    CHECK(rec.lane_width_left == 3.5);
    CHECK(rec.precipitation == 60.0);
    CHECK(rec.fog == 60.0);
    CHECK(rec.wind == 60.0);
    CHECK(rec.night);
    CHECK_FALSE(rec.horizon_line);
    REQUIRE(rec.vehicles.size() == 3);
    const VehicleFrame& ego = rec.vehicles.front();
    CHECK(ego.id == 488);
    CHECK(ego.dims.length == 6.27);
    CHECK(ego.dims.width == 2.39);
    CHECK(ego.dims.height == 2.1);
    CHECK(ego.x == 351.35);
    CHECK(ego.y == 251.58);
    CHECK(ego.lane == 5);  // -7 in the source convention
    CHECK(ego.speed_kmh == 66.0);
    CHECK(ego.accel_mps2 == 76.28);
    CHECK(ego.dir.x() == -0.2);
    CHECK(ego.dir.y() == -3.62);
    CHECK(rec.vehicles[2].speed_kmh == 113.0);
    CHECK(rec.vehicles[2].accel_mps2 == 0.55);  // whitespace inside the tuple
}

TEST_CASE("an empty log writes a header-only file and reads back empty") {
    SimulationLog log;
    std::stringstream ss;
    write_frame_log(log, ss);
    const std::string text = ss.str();
    CHECK(text.find("S,F,TS,IDego,Dim,L,V,D,A,MV,RT,LT,LW,LWR,LWL,C,Prec,Fog,Wind,DN,HL,OV\n") == 0);
    std::stringstream back(text);
    CHECK(read_frame_log(back).frames.empty());
}

TEST_CASE("frame logs round-trip losslessly") {
    const Config cfg;
    const auto logs = generate_logs(cfg, 8, 321);
    for (const auto& log : logs) {
        std::stringstream ss;
        write_frame_log(log, ss);
        const SimulationLog back = read_frame_log(ss);
        CHECK(logs_equal(log, back));
        // A second pass through the writer is byte-identical.
        std::stringstream again;
        write_frame_log(back, again);
        std::stringstream first;
        write_frame_log(log, first);
        CHECK(again.str() == first.str());
    }
}

TEST_CASE("source-convention lane ids round-trip through the flag") {
    const Config cfg;
    const auto logs = generate_logs(cfg, 2, 9);
    std::stringstream ss;
    write_frame_log(logs[0], ss, true);
    CHECK(ss.str().find(",-3)") != std::string::npos);  // lane 1 written as -3
    const SimulationLog back = read_frame_log(ss);
    CHECK(logs_equal(logs[0], back));
}

TEST_CASE("schema deviations are rejected") {
    std::stringstream ss("S,F,TS\n1,2,3\n");
    CHECK_THROWS_AS(read_frame_log(ss), SchemaMismatchError);
}

TEST_CASE("scenario sidecars restore what the frame schema cannot carry") {
    const Config cfg;
    const SimulationLog log = generate_logs(cfg, 1, 77).front();
    std::stringstream frames, meta;
    write_frame_log(log, frames);
    write_log_meta(log, meta);
    SimulationLog back = read_frame_log(frames);
    apply_log_meta(back, meta);
    CHECK(back.seed == log.seed);
    CHECK(back.preset.name == log.preset.name);
    CHECK(back.preset.cloudiness == log.preset.cloudiness);
    REQUIRE(back.vehicles.size() == log.vehicles.size());
    for (std::size_t i = 0; i < log.vehicles.size(); ++i) {
        CHECK(back.vehicles[i].kind == log.vehicles[i].kind);
        CHECK(back.vehicles[i].colour == log.vehicles[i].colour);
        CHECK(back.vehicles[i].target_speed_kmh == log.vehicles[i].target_speed_kmh);
    }
}

TEST_CASE("features files round-trip and reject unknown labels") {
    const Config cfg;
    const auto logs = generate_logs(cfg, 10, 55);
    const auto rows = rows_from_logs(logs, cfg);
    std::stringstream ss;
    write_features_csv(rows, ss);
    const auto back = read_features_csv(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].night == rows[i].night);
        CHECK(back[i].te == rows[i].te);
        CHECK(back[i].tp == rows[i].tp);
        CHECK(back[i].wt == rows[i].wt);
        CHECK(back[i].ot == rows[i].ot);
        CHECK(back[i].nv == rows[i].nv);
        CHECK(back[i].se == rows[i].se);
        CHECK(back[i].sp == rows[i].sp);
        CHECK(back[i].dsep == rows[i].dsep);
        CHECK(back[i].d == rows[i].d);
        CHECK(back[i].olr == rows[i].olr);
        CHECK(back[i].cls == rows[i].cls);
    }

    std::stringstream bad(
        "DN,HL,TE,TP,WT,OT,NV,SE,SP,DSEP,D,OLR,PREC,WIND,FOG,CLASS\n"
        "0,0,0,1,1,2,3,60,50,10,40,5,0,10,2,Almost_made_it\n");
    CHECK_THROWS_AS(read_features_csv(bad), ParseError);

    std::stringstream missing("DN,HL\n0,1\n");
    CHECK_THROWS_AS(read_features_csv(missing), SchemaMismatchError);

    // A No_attempt row writes OT as a bare zero.
    std::vector<FeatureRow> na(1);
    na[0].cls = ClassLabel::No_attempt;
    na[0].wt = 20.0;
    std::stringstream os;
    write_features_csv(na, os);
    CHECK(os.str().find(",20,0,") != std::string::npos);
}

TEST_CASE("relational export keeps keys consistent") {
    const fs::path dir = fresh_dir("relational");
    const Config cfg;
    const auto logs = generate_logs(cfg, 3, 2);
    const auto rows = rows_from_logs(logs, cfg);
    std::vector<const SimulationLog*> ptrs;
    for (const auto& log : logs) ptrs.push_back(&log);
    export_relational(ptrs, rows, dir);
    check_relational(dir);

    std::ifstream frames_in(dir / "frames.csv");
    const CsvTable frames = read_csv(frames_in);
    CHECK(frames.rows.size() == 3 * 401);
    std::ifstream sims_in(dir / "simulations.csv");
    CHECK(read_csv(sims_in).rows.size() == 3);
    std::ifstream veh_in(dir / "vehicles.csv");
    const CsvTable vehicles = read_csv(veh_in);
    std::size_t expected = 0;
    for (const auto& log : logs) expected += log.vehicles.size();
    CHECK(vehicles.rows.size() == expected);
    std::ifstream ego_in(dir / "ego_vehicle.csv");
    const CsvTable ego = read_csv(ego_in);
    CHECK(ego.rows.size() == 3);  // one row per simulation

    // Ego-only columns live in the ego table and not in frames.
    for (const char* col : {"RT", "LT", "LW", "LWR", "LWL", "C", "OV"}) {
        CHECK(std::find(ego.header.begin(), ego.header.end(), col) != ego.header.end());
        CHECK(std::find(frames.header.begin(), frames.header.end(), col) ==
              frames.header.end());
    }

    // Corrupt a frame key and expect the audit to fail.
    std::ifstream in(dir / "frames.csv");
    CsvTable broken = read_csv(in);
    in.close();
    broken.rows[5][0] = "999";
    std::ofstream out(dir / "frames.csv", std::ios::binary);
    write_csv(out, broken);
    out.close();
    CHECK_THROWS_AS(check_relational(dir), ReferentialError);
}

TEST_CASE("replay traces are one JSON object per frame") {
    const Config cfg;
    const SimulationLog log = generate_logs(cfg, 1, 5).front();
    std::stringstream ss;
    write_replay_trace(log, ss);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(ss, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("frame"));
        CHECK(j.at("vehicles").size() == log.vehicles.size());
        ++lines;
    }
    CHECK(lines == log.frames.size());
}

TEST_CASE("verdicts round-trip through labels.json") {
    const Config cfg;
    const auto logs = generate_logs(cfg, 6, 99);
    std::vector<Verdict> verdicts;
    for (const auto& log : logs) {
        Verdict v;
        v.sim_id = log.sim_id;
        v.trace = analyze(log, cfg.detector);
        v.label = classify(log, v.trace);
        verdicts.push_back(v);
    }
    std::stringstream ss;
    write_verdicts_json(verdicts, ss);
    const auto back = read_verdicts_json(ss);
    REQUIRE(back.size() == verdicts.size());
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        CHECK(back[i].sim_id == verdicts[i].sim_id);
        CHECK(back[i].label == verdicts[i].label);
        CHECK(back[i].trace.t_a == verdicts[i].trace.t_a);
        CHECK(back[i].trace.violations.size() == verdicts[i].trace.violations.size());
    }
}

TEST_CASE("the manifest notices tampering") {
    const fs::path dir = fresh_dir("manifest");
    write_artifact(dir, "hello.txt", "hello world\n");
    write_artifact(dir, "sub/data.csv", "a,b\n1,2\n");
    CHECK(validate_manifest(dir).empty());

    std::ofstream tamper(dir / "sub" / "data.csv", std::ios::binary);
    tamper << "a,b\n9,9\n";
    tamper.close();
    const auto problems = validate_manifest(dir);
    REQUIRE(problems.size() == 1);
    CHECK(problems[0].find("sub/data.csv") != std::string::npos);

    fs::remove(dir / "hello.txt");
    CHECK(validate_manifest(dir).size() == 2);
}

TEST_CASE("fnv1a64 matches known vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
}
