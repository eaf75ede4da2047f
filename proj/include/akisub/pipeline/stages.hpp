#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "akisub/pipeline/config.hpp"

namespace akisub::pipeline {

/// Stage names in execution order.
const std::vector<std::string>& stage_names();

/// Output files of a stage, relative to the output directory.
std::vector<std::string> stage_outputs(const std::string& stage);
std::filesystem::path manifest_path(const RunConfig& config, const std::string& stage);

struct StageOutcome {
    std::string stage;
    bool skipped = false;
};

/// Runs one stage into config.output_dir and writes manifests/<stage>.json.
/// A stage whose manifest matches the current config hash, input hashes and
/// output hashes is skipped unless `force`. Throws DependencyError naming the
/// first missing prerequisite artifact, ConfigError for an unknown stage.
StageOutcome run_stage(const std::string& stage, const RunConfig& config, std::ostream* log = nullptr,
                       bool force = false);

/// Every stage in order.
std::vector<StageOutcome> run_all(const RunConfig& config, std::ostream* log = nullptr, bool force = false);

}  // namespace akisub::pipeline
