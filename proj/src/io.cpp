#include "ovtsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ovtsim/csv.hpp"

namespace ovtsim {

using ordered_json = nlohmann::ordered_json;

const std::array<std::string, 22> kFrameLogColumns = {
    "S",  "F",  "TS",  "IDego", "Dim", "L",    "V",   "D",  "A",  "MV", "RT",
    "LT", "LW", "LWR", "LWL",   "C",   "Prec", "Fog", "Wind", "DN", "HL", "OV"};

namespace {

int to_carla_lane(int lane) { return -(lane + 2); }

int from_any_lane(int lane) {
    if (lane <= -3 && lane >= -7) return -lane - 2;
    return lane;
}

std::string tuple_cell(const std::vector<std::string>& tuples) {
    std::string out;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (i) out += ';';
        out += tuples[i];
    }
    return out;
}

// "(a,b,c);(d,e,f)" -> [[a,b,c],[d,e,f]], whitespace tolerated.
std::vector<std::vector<std::string>> parse_tuples(const std::string& cell, std::size_t row,
                                                   std::size_t col) {
    std::vector<std::vector<std::string>> out;
    std::size_t i = 0;
    const auto skip_ws = [&] {
        while (i < cell.size() && (cell[i] == ' ' || cell[i] == '\t' || cell[i] == '\n')) ++i;
    };
    while (true) {
        skip_ws();
        if (i >= cell.size()) break;
        if (cell[i] != '(') throw ParseError("expected '(' in tuple cell", row, col);
        ++i;
        std::vector<std::string> parts;
        std::string part;
        for (; i < cell.size() && cell[i] != ')'; ++i) {
            if (cell[i] == ',') {
                parts.push_back(part);
                part.clear();
            } else if (cell[i] != ' ' && cell[i] != '\t' && cell[i] != '\n') {
                part += cell[i];
            }
        }
        if (i >= cell.size()) throw ParseError("unterminated tuple", row, col);
        ++i;  // ')'
        parts.push_back(part);
        out.push_back(std::move(parts));
        skip_ws();
        if (i < cell.size()) {
            if (cell[i] != ';') throw ParseError("expected ';' between tuples", row, col);
            ++i;
        }
    }
    return out;
}

std::string read_stream(std::istream& in) {
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string sim_basename(int sim_id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sim_%05d", sim_id);
    return buf;
}

}  // namespace

void write_frame_log(const SimulationLog& log, std::ostream& out, bool carla_lane_ids) {
    CsvTable table;
    table.header.assign(kFrameLogColumns.begin(), kFrameLogColumns.end());
    table.rows.reserve(log.frames.size());
    for (const auto& rec : log.frames) {
        std::vector<std::string> dim, loc, vel, dir, acc;
        for (const auto& v : rec.vehicles) {
            const int lane = carla_lane_ids ? to_carla_lane(v.lane) : v.lane;
            dim.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.dims.length) +
                          "," + format_fixed2(v.dims.width) + "," +
                          format_fixed2(v.dims.height) + ")");
            loc.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.x) + "," +
                          format_fixed2(v.y) + "," + std::to_string(lane) + ")");
            vel.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.speed_kmh) + ")");
            dir.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.dir.x()) + "," +
                          format_fixed2(v.dir.y()) + ")");
            acc.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.accel_mps2) + ")");
        }
        std::vector<std::string> row = {
            std::to_string(rec.sim),
            std::to_string(rec.frame),
            format_trimmed2(rec.ts),
            std::to_string(rec.id_ego),
            tuple_cell(dim),
            tuple_cell(loc),
            tuple_cell(vel),
            tuple_cell(dir),
            tuple_cell(acc),
            std::to_string(rec.mv_kmh),
            rec.right_line,
            rec.left_line,
            format_trimmed2(rec.lane_width),
            format_trimmed2(rec.lane_width_right),
            format_trimmed2(rec.lane_width_left),
            rec.collision_with ? std::to_string(*rec.collision_with) : "",
            format_trimmed2(rec.precipitation),
            format_trimmed2(rec.fog),
            format_trimmed2(rec.wind),
            rec.night ? "Night" : "Day",
            rec.horizon_line ? "Yes" : "No",
            std::to_string(rec.ov),
        };
        table.rows.push_back(std::move(row));
    }
    write_csv(out, table);
}

SimulationLog read_frame_log(std::istream& in) {
    const CsvTable table = read_csv(in);
    if (table.header.size() != kFrameLogColumns.size() ||
        !std::equal(table.header.begin(), table.header.end(), kFrameLogColumns.begin())) {
        throw SchemaMismatchError("frame log header does not match the 22-column schema");
    }
    SimulationLog log;
    std::map<int, VehicleMeta> meta;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = r + 2;  // header is line 1
        if (row.size() != kFrameLogColumns.size()) {
            throw ParseError("expected 22 cells, got " + std::to_string(row.size()), line, 1);
        }
        FrameRecord rec;
        rec.sim = static_cast<int>(parse_int_cell(row[0], line, 1));
        rec.frame = static_cast<int>(parse_int_cell(row[1], line, 2));
        rec.ts = parse_scalar_cell(row[2], line, 3);
        rec.id_ego = static_cast<int>(parse_int_cell(row[3], line, 4));

        const auto dims = parse_tuples(row[4], line, 5);
        const auto locs = parse_tuples(row[5], line, 6);
        const auto vels = parse_tuples(row[6], line, 7);
        const auto dirs = parse_tuples(row[7], line, 8);
        const auto accs = parse_tuples(row[8], line, 9);
        if (dims.size() != locs.size() || locs.size() != vels.size() ||
            vels.size() != dirs.size() || dirs.size() != accs.size()) {
            throw ParseError("per-vehicle tuple counts disagree", line, 5);
        }
        for (std::size_t v = 0; v < dims.size(); ++v) {
            if (dims[v].size() != 4 || locs[v].size() != 4 || vels[v].size() != 2 ||
                dirs[v].size() != 3 || accs[v].size() != 2) {
                throw ParseError("tuple arity mismatch", line, 5);
            }
            VehicleFrame f;
            f.id = static_cast<int>(parse_int_cell(dims[v][0], line, 5));
            f.dims.length = parse_scalar_cell(dims[v][1], line, 5);
            f.dims.width = parse_scalar_cell(dims[v][2], line, 5);
            f.dims.height = parse_scalar_cell(dims[v][3], line, 5);
            if (static_cast<int>(parse_int_cell(locs[v][0], line, 6)) != f.id) {
                throw ParseError("vehicle ids disagree across tuple columns", line, 6);
            }
            f.x = parse_scalar_cell(locs[v][1], line, 6);
            f.y = parse_scalar_cell(locs[v][2], line, 6);
            f.lane = from_any_lane(static_cast<int>(parse_int_cell(locs[v][3], line, 6)));
            f.speed_kmh = parse_scalar_cell(vels[v][1], line, 7);
            f.dir = Eigen::Vector2d(parse_scalar_cell(dirs[v][1], line, 8),
                                    parse_scalar_cell(dirs[v][2], line, 8));
            f.accel_mps2 = parse_scalar_cell(accs[v][1], line, 9);
            rec.vehicles.push_back(f);

            auto [it, fresh] = meta.emplace(f.id, VehicleMeta{});
            if (fresh) {
                it->second.id = f.id;
                it->second.dims = f.dims;
                it->second.lane0 = f.lane;
                it->second.x0 = f.x;
            }
        }

        rec.mv_kmh = static_cast<int>(parse_int_cell(row[9], line, 10));
        rec.right_line = row[10];
        rec.left_line = row[11];
        rec.lane_width = parse_scalar_cell(row[12], line, 13);
        rec.lane_width_right = parse_scalar_cell(row[13], line, 14);
        rec.lane_width_left = parse_scalar_cell(row[14], line, 15);
        if (!row[15].empty()) {
            const int other = static_cast<int>(parse_int_cell(row[15], line, 16));
            if (other != 0) rec.collision_with = other;
        }
        rec.precipitation = parse_scalar_cell(row[16], line, 17);
        rec.fog = parse_scalar_cell(row[17], line, 18);
        rec.wind = parse_scalar_cell(row[18], line, 19);
        rec.night = encode_day_night(row[19]) == 1;
        rec.horizon_line = encode_yes_no(row[20]) == 1;
        rec.ov = static_cast<int>(parse_int_cell(row[21], line, 22));
        log.frames.push_back(std::move(rec));
    }

    if (!log.frames.empty()) {
        log.sim_id = log.frames.front().sim;
        log.ego_id = log.frames.front().id_ego;
        log.mv_limit_kmh = log.frames.front().mv_kmh;
        log.dt = log.frames.size() > 1 ? quantize2(log.frames[1].ts - log.frames[0].ts) : 0.05;
        log.duration = log.frames.back().ts;
        log.preset.precipitation = log.frames.front().precipitation;
        log.preset.fog = log.frames.front().fog;
        log.preset.wind = log.frames.front().wind;
        log.preset.is_night = log.frames.front().night;
        log.preset.horizon_line = log.frames.front().horizon_line;
        for (auto& [id, m] : meta) log.vehicles.push_back(m);
    }
    return log;
}

void write_log_meta(const SimulationLog& log, std::ostream& out) {
    ordered_json j;
    j["sim_id"] = log.sim_id;
    j["seed"] = log.seed;
    j["duration"] = log.duration;
    j["dt"] = log.dt;
    j["mv_limit"] = log.mv_limit_kmh;
    j["ego_id"] = log.ego_id;
    j["preset"] = {
        {"name", log.preset.name},
        {"is_night", log.preset.is_night},
        {"horizon_line", log.preset.horizon_line},
        {"cloudiness", log.preset.cloudiness},
        {"precipitation", log.preset.precipitation},
        {"wind", log.preset.wind},
        {"fog", log.preset.fog},
    };
    j["vehicles"] = ordered_json::array();
    for (const auto& v : log.vehicles) {
        ordered_json vj;
        vj["id"] = v.id;
        if (v.kind) vj["kind"] = std::string(to_string(*v.kind));
        vj["colour"] = v.colour;
        vj["length"] = v.dims.length;
        vj["width"] = v.dims.width;
        vj["height"] = v.dims.height;
        vj["target_speed"] = v.target_speed_kmh;
        vj["lane0"] = v.lane0;
        vj["x0"] = v.x0;
        j["vehicles"].push_back(vj);
    }
    out << j.dump(2) << '\n';
}

void apply_log_meta(SimulationLog& log, std::istream& in) {
    const ordered_json j = ordered_json::parse(read_stream(in));
    log.sim_id = j.at("sim_id").get<int>();
    log.seed = j.at("seed").get<std::uint64_t>();
    log.duration = j.at("duration").get<Scalar>();
    log.dt = j.at("dt").get<Scalar>();
    log.mv_limit_kmh = j.at("mv_limit").get<int>();
    log.ego_id = j.at("ego_id").get<int>();
    const auto& p = j.at("preset");
    log.preset.name = p.at("name").get<std::string>();
    log.preset.is_night = p.at("is_night").get<bool>();
    log.preset.horizon_line = p.at("horizon_line").get<bool>();
    log.preset.cloudiness = p.at("cloudiness").get<Scalar>();
    log.preset.precipitation = p.at("precipitation").get<Scalar>();
    log.preset.wind = p.at("wind").get<Scalar>();
    log.preset.fog = p.at("fog").get<Scalar>();
    std::map<int, const ordered_json*> by_id;
    for (const auto& vj : j.at("vehicles")) by_id[vj.at("id").get<int>()] = &vj;
    for (auto& v : log.vehicles) {
        const auto it = by_id.find(v.id);
        if (it == by_id.end()) continue;
        const ordered_json& vj = *it->second;
        if (vj.contains("kind")) {
            v.kind = vehicle_kind_from_string(vj.at("kind").get<std::string>());
        }
        v.colour = vj.at("colour").get<std::string>();
        v.dims.length = vj.at("length").get<Scalar>();
        v.dims.width = vj.at("width").get<Scalar>();
        v.dims.height = vj.at("height").get<Scalar>();
        v.target_speed_kmh = vj.at("target_speed").get<int>();
        v.lane0 = vj.at("lane0").get<int>();
        v.x0 = vj.at("x0").get<Scalar>();
    }
}

void write_simulation(const SimulationLog& log, const std::filesystem::path& dir,
                      bool carla_lane_ids, ManifestEntries* manifest_acc) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "scenarios");
    const std::string base = sim_basename(log.sim_id);
    {
        std::ostringstream os;
        write_frame_log(log, os, carla_lane_ids);
        write_artifact(dir, "frames/" + base + ".csv", os.str(), manifest_acc);
    }
    {
        std::ostringstream os;
        write_log_meta(log, os);
        write_artifact(dir, "scenarios/" + base + ".json", os.str(), manifest_acc);
    }
}

SimulationLog read_simulation(const std::filesystem::path& dir, int sim_id) {
    const std::string base = sim_basename(sim_id);
    std::ifstream frames(dir / "frames" / (base + ".csv"));
    if (!frames) {
        throw std::runtime_error("missing frame log for simulation " + std::to_string(sim_id));
    }
    SimulationLog log = read_frame_log(frames);
    std::ifstream meta(dir / "scenarios" / (base + ".json"));
    if (meta) apply_log_meta(log, meta);
    return log;
}

std::vector<int> list_sim_ids(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::vector<int> ids;
    const fs::path frames = dir / "frames";
    if (!fs::exists(frames)) return ids;
    for (const auto& entry : fs::directory_iterator(frames)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("sim_", 0) == 0 && entry.path().extension() == ".csv") {
            ids.push_back(std::stoi(name.substr(4, name.size() - 8)));
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

// ---- features dataset -------------------------------------------------------

void write_features_csv(const std::vector<FeatureRow>& rows, std::ostream& out) {
    CsvTable table;
    table.header.assign(kFeatureColumns.begin(), kFeatureColumns.end());
    for (const auto& row : rows) {
        const EncodedRow enc = encode_categorical(row);
        std::vector<std::string> cells;
        cells.reserve(16);
        for (int i = 0; i < 4; ++i) {
            cells.push_back(std::to_string(static_cast<int>(std::llround(enc.values[i]))));
        }
        for (int i = 4; i < 6; ++i) cells.push_back(format_trimmed2(enc.values[i]));
        cells.push_back(std::to_string(static_cast<int>(std::llround(enc.values[6]))));
        for (int i = 7; i < 15; ++i) cells.push_back(format_trimmed2(enc.values[i]));
        cells.push_back(std::string(to_string(row.cls)));
        table.rows.push_back(std::move(cells));
    }
    write_csv(out, table);
}

std::vector<FeatureRow> read_features_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    if (table.header.size() != kFeatureColumns.size() ||
        !std::equal(table.header.begin(), table.header.end(), kFeatureColumns.begin())) {
        throw SchemaMismatchError("features header does not match the 16-column schema");
    }
    std::vector<FeatureRow> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        const std::size_t line = r + 2;
        if (cells.size() != 16) {
            throw ParseError("expected 16 cells, got " + std::to_string(cells.size()), line, 1);
        }
        EncodedRow enc;
        for (int i = 0; i < 15; ++i) {
            enc.values[static_cast<std::size_t>(i)] =
                parse_scalar_cell(cells[static_cast<std::size_t>(i)], line,
                                  static_cast<std::size_t>(i) + 1);
        }
        try {
            enc.cls = class_label_from_string(cells[15]);
            rows.push_back(decode_categorical(enc));
        } catch (const UnknownCategoryError& e) {
            throw ParseError(e.what(), line, 16);
        }
    }
    return rows;
}

// ---- relational export -------------------------------------------------------

void export_relational(const std::vector<const SimulationLog*>& logs,
                       const std::vector<FeatureRow>& rows,
                       const std::filesystem::path& dir) {
    if (logs.size() != rows.size()) {
        throw std::invalid_argument("export_relational needs one feature row per log");
    }
    std::filesystem::create_directories(dir);

    CsvTable sims, frames, vehicles, ego, weather;
    sims.header = {"S", "seed", "n_vehicles", "id_ego", "duration_s", "dt_s", "class"};
    frames.header = {"S", "F", "TS", "MV", "L", "V", "D", "A"};
    vehicles.header = {"S",        "idv",    "kind",  "colour", "length_m", "width_m",
                       "height_m", "lane0", "x0_m",  "target_speed_kmh"};
    ego.header = {"S", "idv", "RT", "LT", "LW", "LWR", "LWL", "C", "OV"};
    weather.header = {"S",    "preset", "DN",   "HL", "cloudiness", "precipitation",
                      "wind", "fog"};

    for (std::size_t k = 0; k < logs.size(); ++k) {
        const SimulationLog& log = *logs[k];
        const std::string s = std::to_string(log.sim_id);
        if (!log.find_vehicle(log.ego_id)) {
            throw ReferentialError("ego id " + std::to_string(log.ego_id) +
                                   " not among vehicles of simulation " + s);
        }
        sims.rows.push_back({s, std::to_string(log.seed),
                             std::to_string(log.vehicles.size()), std::to_string(log.ego_id),
                             format_trimmed2(log.duration), format_trimmed2(log.dt),
                             std::string(to_string(rows[k].cls))});
        weather.rows.push_back({s, log.preset.name, log.preset.is_night ? "Night" : "Day",
                                log.preset.horizon_line ? "Yes" : "No",
                                format_trimmed2(log.preset.cloudiness),
                                format_trimmed2(log.preset.precipitation),
                                format_trimmed2(log.preset.wind),
                                format_trimmed2(log.preset.fog)});
        for (const auto& v : log.vehicles) {
            vehicles.rows.push_back({s, std::to_string(v.id),
                                     v.kind ? std::string(to_string(*v.kind)) : "",
                                     v.colour, format_fixed2(v.dims.length),
                                     format_fixed2(v.dims.width), format_fixed2(v.dims.height),
                                     std::to_string(v.lane0), format_fixed2(v.x0),
                                     std::to_string(v.target_speed_kmh)});
        }

        std::optional<int> collision_with;
        std::vector<int> ov_frames;
        for (const auto& rec : log.frames) {
            if (rec.collision_with && !collision_with) collision_with = rec.collision_with;
            if (rec.ov == 1) ov_frames.push_back(rec.frame);
            std::vector<std::string> loc, vel, dirs, acc;
            for (const auto& v : rec.vehicles) {
                loc.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.x) + "," +
                              format_fixed2(v.y) + "," + std::to_string(v.lane) + ")");
                vel.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.speed_kmh) +
                              ")");
                dirs.push_back("(" + std::to_string(v.id) + "," + format_fixed2(v.dir.x()) +
                               "," + format_fixed2(v.dir.y()) + ")");
                acc.push_back("(" + std::to_string(v.id) + "," +
                              format_fixed2(v.accel_mps2) + ")");
            }
            frames.rows.push_back({s, std::to_string(rec.frame), format_trimmed2(rec.ts),
                                   std::to_string(rec.mv_kmh), tuple_cell(loc),
                                   tuple_cell(vel), tuple_cell(dirs), tuple_cell(acc)});
        }
        if (collision_with && !log.find_vehicle(*collision_with)) {
            throw ReferentialError("collision references unknown vehicle " +
                                   std::to_string(*collision_with) + " in simulation " + s);
        }
        const FrameRecord& first = log.frames.front();
        std::string ov_list;
        for (std::size_t i = 0; i < ov_frames.size(); ++i) {
            if (i) ov_list += ';';
            ov_list += std::to_string(ov_frames[i]);
        }
        ego.rows.push_back({s, std::to_string(log.ego_id), first.right_line, first.left_line,
                            format_trimmed2(first.lane_width),
                            format_trimmed2(first.lane_width_right),
                            format_trimmed2(first.lane_width_left),
                            collision_with ? std::to_string(*collision_with) : "0", ov_list});
    }

    const auto dump = [&](const char* name, const CsvTable& t) {
        std::ostringstream os;
        write_csv(os, t);
        std::ofstream f(dir / name, std::ios::binary);
        f << os.str();
    };
    dump("simulations.csv", sims);
    dump("frames.csv", frames);
    dump("vehicles.csv", vehicles);
    dump("ego_vehicle.csv", ego);
    dump("weather.csv", weather);
}

void check_relational(const std::filesystem::path& dir) {
    const auto load = [&](const char* name) {
        std::ifstream f(dir / name);
        if (!f) throw ReferentialError(std::string("missing table ") + name);
        return read_csv(f);
    };
    const CsvTable sims = load("simulations.csv");
    const CsvTable frames = load("frames.csv");
    const CsvTable vehicles = load("vehicles.csv");
    const CsvTable ego = load("ego_vehicle.csv");
    const CsvTable weather = load("weather.csv");

    std::set<std::string> sim_ids;
    for (const auto& row : sims.rows) sim_ids.insert(row.at(0));
    std::set<std::pair<std::string, std::string>> vehicle_keys;
    for (const auto& row : vehicles.rows) {
        if (!sim_ids.count(row.at(0))) {
            throw ReferentialError("vehicles row references unknown simulation " + row.at(0));
        }
        vehicle_keys.insert({row.at(0), row.at(1)});
    }
    for (const auto& row : frames.rows) {
        if (!sim_ids.count(row.at(0))) {
            throw ReferentialError("frames row references unknown simulation " + row.at(0));
        }
    }
    for (const auto& row : weather.rows) {
        if (!sim_ids.count(row.at(0))) {
            throw ReferentialError("weather row references unknown simulation " + row.at(0));
        }
    }
    for (const auto& row : ego.rows) {
        if (!sim_ids.count(row.at(0))) {
            throw ReferentialError("ego row references unknown simulation " + row.at(0));
        }
        if (!vehicle_keys.count({row.at(0), row.at(1)})) {
            throw ReferentialError("ego row references unknown vehicle " + row.at(1) +
                                   " in simulation " + row.at(0));
        }
        if (row.at(7) != "0" && !vehicle_keys.count({row.at(0), row.at(7)})) {
            throw ReferentialError("collision references unknown vehicle " + row.at(7) +
                                   " in simulation " + row.at(0));
        }
    }
}

// ---- replay trace ------------------------------------------------------------

void write_replay_trace(const SimulationLog& log, std::ostream& out) {
    for (const auto& rec : log.frames) {
        ordered_json j;
        j["frame"] = rec.frame;
        j["ts"] = rec.ts;
        j["vehicles"] = ordered_json::array();
        for (const auto& v : rec.vehicles) {
            j["vehicles"].push_back({{"id", v.id},
                                     {"x", v.x},
                                     {"y", v.y},
                                     {"lane", v.lane},
                                     {"speed", v.speed_kmh}});
        }
        out << j.dump() << '\n';
    }
}

// ---- verdicts ------------------------------------------------------------------

void write_verdicts_json(const std::vector<Verdict>& verdicts, std::ostream& out) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : verdicts) {
        ordered_json j;
        j["sim"] = v.sim_id;
        j["class"] = std::string(to_string(v.label));
        j["stages"] = std::string(to_string(v.trace.stages));
        if (v.trace.t_a) j["t_a"] = *v.trace.t_a;
        if (v.trace.t_b) j["t_b"] = *v.trace.t_b;
        if (v.trace.t_collision) j["t_collision"] = *v.trace.t_collision;
        if (v.trace.collision_with) j["collision_with"] = *v.trace.collision_with;
        if (v.trace.end_frame) j["end_frame"] = *v.trace.end_frame;
        ordered_json viols = ordered_json::array();
        for (const auto& viol : v.trace.violations) {
            viols.push_back({{"rule", std::string(to_string(viol.rule))},
                             {"frame", viol.frame},
                             {"detail", viol.detail}});
        }
        j["violations"] = viols;
        arr.push_back(j);
    }
    out << arr.dump(2) << '\n';
}

std::vector<Verdict> read_verdicts_json(std::istream& in) {
    const ordered_json arr = ordered_json::parse(read_stream(in));
    std::vector<Verdict> out;
    for (const auto& j : arr) {
        Verdict v;
        v.sim_id = j.at("sim").get<int>();
        v.label = class_label_from_string(j.at("class").get<std::string>());
        const std::string stages = j.at("stages").get<std::string>();
        v.trace.stages = stages == "STAGE3"  ? StageReached::STAGE3
                         : stages == "STAGE2" ? StageReached::STAGE2
                                               : StageReached::NONE;
        if (j.contains("t_a")) v.trace.t_a = j.at("t_a").get<Scalar>();
        if (j.contains("t_b")) v.trace.t_b = j.at("t_b").get<Scalar>();
        if (j.contains("t_collision")) v.trace.t_collision = j.at("t_collision").get<Scalar>();
        if (j.contains("collision_with")) {
            v.trace.collision_with = j.at("collision_with").get<int>();
        }
        if (j.contains("end_frame")) v.trace.end_frame = j.at("end_frame").get<int>();
        for (const auto& viol : j.at("violations")) {
            RuleViolation rv;
            const std::string rule = viol.at("rule").get<std::string>();
            rv.rule = rule == "SOLID_LINE_CROSS" ? RuleKind::SOLID_LINE_CROSS
                      : rule == "SPEEDING"        ? RuleKind::SPEEDING
                                                  : RuleKind::UNSAFE_GAP;
            rv.frame = viol.at("frame").get<int>();
            rv.detail = viol.at("detail").get<std::string>();
            v.trace.violations.push_back(std::move(rv));
        }
        out.push_back(std::move(v));
    }
    return out;
}

// ---- manifest --------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

void merge_manifest(const std::filesystem::path& dir, const ManifestEntries& files) {
    namespace fs = std::filesystem;
    const fs::path manifest_path = dir / "manifest.json";
    std::map<std::string, std::pair<std::uint64_t, std::string>> entries;
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        const ordered_json j = ordered_json::parse(read_stream(in));
        for (const auto& e : j.at("artifacts")) {
            entries[e.at("path").get<std::string>()] = {
                e.at("bytes").get<std::uint64_t>(), e.at("fnv1a64").get<std::string>()};
        }
    }
    for (const auto& [rel, content] : files) {
        entries[rel] = {content.size(), fnv1a64_hex(content)};
    }
    ordered_json j;
    j["format"] = 1;
    j["artifacts"] = ordered_json::array();
    for (const auto& [path, info] : entries) {
        j["artifacts"].push_back(
            {{"path", path}, {"bytes", info.first}, {"fnv1a64", info.second}});
    }
    std::ofstream out(manifest_path, std::ios::binary);
    out << j.dump(2) << '\n';
}

void write_artifact(const std::filesystem::path& dir, const std::string& rel_path,
                    const std::string& content, ManifestEntries* manifest_acc) {
    namespace fs = std::filesystem;
    const fs::path full = dir / rel_path;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + full.string());
    out << content;
    out.close();
    if (manifest_acc) manifest_acc->emplace_back(rel_path, content);
    else merge_manifest(dir, {{rel_path, content}});
}

std::vector<std::string> validate_manifest(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> problems;
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) {
        problems.push_back("manifest.json missing");
        return problems;
    }
    std::ifstream in(manifest_path);
    const ordered_json j = ordered_json::parse(read_stream(in));
    for (const auto& e : j.at("artifacts")) {
        const std::string rel = e.at("path").get<std::string>();
        const fs::path full = dir / rel;
        if (!fs::exists(full)) {
            problems.push_back(rel + ": missing");
            continue;
        }
        std::ifstream f(full, std::ios::binary);
        const std::string content = read_stream(f);
        if (content.size() != e.at("bytes").get<std::uint64_t>()) {
            problems.push_back(rel + ": size mismatch");
        } else if (fnv1a64_hex(content) != e.at("fnv1a64").get<std::string>()) {
            problems.push_back(rel + ": content hash mismatch");
        }
    }
    return problems;
}

}  // namespace ovtsim
