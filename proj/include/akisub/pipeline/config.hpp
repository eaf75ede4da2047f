#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "akisub/cohort/generator.hpp"
#include "akisub/model/memnet.hpp"

namespace akisub::pipeline {

inline constexpr int kSchemaVersion = 1;

struct ClusterSettings {
    double perplexity = 30.0;
    std::size_t tsne_iterations = 1000;
    std::size_t restarts = 10;
    std::size_t autoencoder_epochs = 200;

    friend bool operator==(const ClusterSettings&, const ClusterSettings&) = default;
};

struct EvaluateSettings {
    std::vector<std::string> models = {"lr_unstr", "hielstm", "lr_str", "lstm", "lr_both", "mn_hielstm"};
    std::size_t outer_folds = 5;
    std::size_t inner_folds = 5;
    std::vector<double> lr_multipliers = {0.5, 1.0, 2.0};
    std::vector<std::size_t> hops = {1, 2};
    double lr_l2 = 1e-3;
    std::size_t lr_epochs = 1000;
    std::size_t jobs = 1;

    friend bool operator==(const EvaluateSettings&, const EvaluateSettings&) = default;
};

/// Everything a pipeline run depends on. `seed` is the master seed copied
/// into the cohort, model and clustering seeds by apply_seed().
struct RunConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 1;
    double t1_hours = 24.0;
    double t2_days = 7.0;
    std::filesystem::path output_dir = "akisub-out";
    std::optional<std::filesystem::path> cohort_path;
    cohort::CohortConfig cohort;
    std::string model = "mn_hielstm";
    model::HyperConfig hyper = desk_hyper();
    std::size_t max_note_len = 0;
    std::size_t vocab_min_count = 1;
    std::vector<std::size_t> k_range = {2, 3, 4, 5, 6};
    ClusterSettings cluster;
    EvaluateSettings evaluate;

    /// Reduced widths that keep full runs to minutes on one core.
    static model::HyperConfig desk_hyper();

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const std::vector<std::string>& known_models() {
    static const std::vector<std::string> ids = {"lr_unstr", "hielstm", "lr_str", "lstm", "lr_both", "mn_hielstm"};
    return ids;
}

/// Sets cohort.seed and hyper.seed from `seed`, and memory_size from t1.
void apply_seed(RunConfig& config, std::uint64_t seed);
void apply_t1(RunConfig& config, double t1_hours);

/// Throws ConfigError on an out-of-range field or a missing cohort file.
void validate(const RunConfig& config);

/// schema_version is required; other missing keys keep their defaults.
/// Unknown keys and a schema_version other than kSchemaVersion are rejected
/// with ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

}  // namespace akisub::pipeline
