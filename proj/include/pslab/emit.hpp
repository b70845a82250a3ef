#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pslab {

inline constexpr const char* kToolVersion = "pslab 1.0.0";

// All floats funnel through here: 12 significant digits, shared by CSV and
// JSON so both formats carry identical numeric content.
std::string fmt_double(double v);
double round12(double v);  // fmt_double parsed back

// Column-ordered table for CSV emission.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
std::string to_csv(const Table& t);

// Deterministic JSON text: sorted keys (nlohmann's ordered map), 2-space
// indent, trailing newline.
std::string to_json_text(const nlohmann::json& j);

// Writes text to path, or stdout when path is empty. Returns the paths of
// files actually created (empty for stdout).
std::vector<std::string> emit_text(const std::string& text, const std::string& path);

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::optional<uint64_t> seed;
    std::string tool_version = kToolVersion;
    uint64_t wall_time_ms = 0;
    std::vector<std::string> outputs;
    std::vector<std::string> argv;  // verbatim invocation, used by replay

    std::string to_json() const;
    static RunManifest from_json_text(const std::string& text);
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace pslab
