#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace akisub::pipeline {

std::uint64_t fnv1a(std::string_view bytes);
/// 16 lowercase hex digits of the FNV-1a hash of the file contents. Throws
/// IoError when unreadable.
std::string hash_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

/// Record of one completed stage. Paths are relative to the output directory.
struct Manifest {
    std::string stage;
    std::string config_hash;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, std::string> inputs;   // path -> hash
    std::map<std::string, std::string> outputs;  // path -> hash

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
/// nullopt when the file does not exist; ParseError when it is malformed.
std::optional<Manifest> read_manifest(const std::filesystem::path& path);

}  // namespace akisub::pipeline
