#include "akisub/pipeline/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "akisub/error.hpp"

namespace akisub::pipeline {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a(ss.str()));
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    json j = {{"stage", m.stage}, {"config_hash", m.config_hash}, {"seeds", m.seeds},
              {"inputs", m.inputs}, {"outputs", m.outputs}};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

std::optional<Manifest> read_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    try {
        json j = json::parse(in);
        Manifest m;
        m.stage = j.at("stage").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
        m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw ParseError("malformed manifest '" + path.string() + "': " + e.what());
    }
}

}  // namespace akisub::pipeline
