#include "pslab/emit.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pslab/errors.hpp"

namespace pslab {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round12(double v) { return std::strtod(fmt_double(v).c_str(), nullptr); }

std::string to_csv(const Table& t) {
    std::ostringstream out;
    for (size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

std::string to_json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> emit_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return {};
    }
    write_file(path, text);
    return {path};
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    if (seed) j["seed"] = *seed;
    j["tool_version"] = tool_version;
    j["wall_time_ms"] = wall_time_ms;
    j["outputs"] = outputs;
    j["argv"] = argv;
    return to_json_text(j);
}

RunManifest RunManifest::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.parameters = j.value("parameters", std::map<std::string, std::string>{});
    if (j.contains("seed")) m.seed = j.at("seed").get<uint64_t>();
    m.tool_version = j.value("tool_version", std::string{});
    m.wall_time_ms = j.value("wall_time_ms", uint64_t{0});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.argv = j.value("argv", std::vector<std::string>{});
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot read: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write: " + path);
    out << text;
    if (!out) throw ResourceError("write failed: " + path);
}

}  // namespace pslab
