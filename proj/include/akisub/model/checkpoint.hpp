#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "akisub/model/memnet.hpp"

namespace akisub::model {

/// Text checkpoint:
///   akisub-checkpoint 1
///   meta <one-line JSON>
///   tensor <name> <rank> <dim>...
///   <values, whitespace separated, 17 significant digits>
/// repeated per tensor in parameter order.
struct Checkpoint {
    std::string meta_json;
    ParameterSet params;
};

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws ParseError on a malformed or truncated file.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

void save_memnet(const MemNet& model, const std::filesystem::path& path);
MemNet load_memnet(const std::filesystem::path& path);

std::string hyper_to_json(const HyperConfig& hyper);
HyperConfig hyper_from_json(const std::string& text);

}  // namespace akisub::model
