#include "edcuav/scenario_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "edcuav/error.hpp"

namespace edc::io {
namespace {

using nlohmann::json;

json point(const Vec2& p) { return json::array({p.x, p.y}); }

Vec2 parse_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::MalformedInput, std::string(what) + " must be an [x, y] pair");
    }
    return Vec2{j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T field(const json& obj, const char* key) {
    if (!obj.contains(key)) throw Error(ErrorCode::MalformedInput, std::string("missing field '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
    json uavs = json::array();
    for (const auto& u : sc.uavs) {
        json j;
        j["id"] = u.id;
        j["start"] = point(u.start);
        j["goal"] = point(u.goal);
        j["gps_error_radius"] = u.gps_error_radius;
        j["v_max"] = u.v_max;
        j["energy"] = u.energy;
        j["compute_capacity"] = u.compute_capacity;
        uavs.push_back(std::move(j));
    }
    json doc;
    doc["version"] = std::string(kScenarioFormatVersion);
    doc["area_width"] = sc.area_width;
    doc["area_height"] = sc.area_height;
    doc["dt"] = sc.dt;
    doc["num_slots"] = sc.num_slots;
    doc["seed"] = sc.seed;
    doc["uavs"] = std::move(uavs);
    return doc.dump(2) + "\n";
}

Scenario scenario_from_json(std::string_view text, SeparationCheck check) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedInput, e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::MalformedInput, "scenario must be a JSON object");
    if (field<std::string>(doc, "version") != kScenarioFormatVersion) {
        throw Error(ErrorCode::MalformedInput, "unsupported scenario format version");
    }

    Scenario sc;
    sc.area_width = field<double>(doc, "area_width");
    sc.area_height = field<double>(doc, "area_height");
    sc.dt = field<double>(doc, "dt");
    sc.num_slots = field<int>(doc, "num_slots");
    sc.seed = field<std::uint64_t>(doc, "seed");
    const json uavs = field<json>(doc, "uavs");
    if (!uavs.is_array()) throw Error(ErrorCode::MalformedInput, "'uavs' must be an array");
    for (const auto& j : uavs) {
        if (!j.is_object()) throw Error(ErrorCode::MalformedInput, "uav entries must be objects");
        UavSpec u;
        u.id = field<int>(j, "id");
        u.start = parse_point(field<json>(j, "start"), "start");
        u.goal = parse_point(field<json>(j, "goal"), "goal");
        u.gps_error_radius = field<double>(j, "gps_error_radius");
        u.v_max = field<double>(j, "v_max");
        u.energy = field<double>(j, "energy");
        u.compute_capacity = field<double>(j, "compute_capacity");
        sc.uavs.push_back(u);
    }
    sc.validate(check);
    return sc;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scenario read_scenario_file(const std::filesystem::path& path, SeparationCheck check) {
    return scenario_from_json(read_file(path), check);
}

void write_scenario_file(const std::filesystem::path& path, const Scenario& scenario) {
    write_file_atomic(path, scenario_to_json(scenario));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorCode::InvalidInput, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace edc::io
