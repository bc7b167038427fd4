#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pglab {

inline constexpr const char* kToolVersion = "0.3.0";

std::string sha256_hex(const std::filesystem::path& file);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct RunManifest {
    std::string command;
    std::string config_text;
    double duration_seconds = 0.0;
    std::vector<std::filesystem::path> outputs;  // relative to the output directory
};

// JSON document led by the hash algorithm, then tool version, command,
// config echo, duration and one {path, sha256} entry per output.
std::string render_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

}  // namespace pglab
