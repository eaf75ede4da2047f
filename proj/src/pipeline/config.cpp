#include "akisub/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "akisub/error.hpp"

namespace akisub::pipeline {

using nlohmann::json;

model::HyperConfig RunConfig::desk_hyper() {
    model::HyperConfig h;
    h.emb_dim = 32;
    h.top_hidden = 32;
    h.word_dim = 16;
    h.bottom_hidden = 32;
    h.epochs = 10;
    return h;
}

void apply_seed(RunConfig& config, std::uint64_t seed) {
    config.seed = seed;
    config.cohort.seed = seed;
    config.hyper.seed = seed;
}

void apply_t1(RunConfig& config, double t1_hours) {
    config.t1_hours = t1_hours;
    if (t1_hours > 0.0) config.hyper.memory_size = static_cast<std::size_t>(t1_hours / 2.0);
}

void validate(const RunConfig& c) {
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    if (c.t1_hours != 24.0 && c.t1_hours != 48.0) throw ConfigError("t1_hours must be 24 or 48");
    if (c.t2_days != 7.0) throw ConfigError("t2_days is fixed at 7");
    if (c.output_dir.empty()) throw ConfigError("output_dir is empty");
    if (c.cohort_path && !std::filesystem::exists(*c.cohort_path))
        throw ConfigError("cohort_path '" + c.cohort_path->string() + "' does not exist");
    cohort::validate(c.cohort);
    model::validate(c.hyper);
    if (c.hyper.memory_size * 2 != static_cast<std::size_t>(c.t1_hours))
        throw ConfigError("hyper.memory_size must equal t1_hours / 2");
    if (c.model != "mn_hielstm")
        throw ConfigError("model '" + c.model + "' cannot produce representations; use mn_hielstm");
    if (c.k_range.empty()) throw ConfigError("k_range is empty");
    for (auto k : c.k_range)
        if (k < 2) throw ConfigError("k_range entries must be at least 2");
    if (!(c.cluster.perplexity > 0.0)) throw ConfigError("cluster.perplexity must be positive");
    if (c.cluster.restarts == 0) throw ConfigError("cluster.restarts must be positive");
    const auto& e = c.evaluate;
    if (e.models.empty()) throw ConfigError("evaluate.models is empty");
    for (const auto& m : e.models)
        if (std::find(known_models().begin(), known_models().end(), m) == known_models().end())
            throw ConfigError("unknown model '" + m + "'");
    if (e.outer_folds < 2 || e.inner_folds < 2) throw ConfigError("fold counts must be at least 2");
    if (e.lr_multipliers.empty() || e.hops.empty()) throw ConfigError("tuning grid is empty");
    for (double m : e.lr_multipliers)
        if (!(m > 0.0)) throw ConfigError("lr multipliers must be positive");
    for (auto h : e.hops)
        if (h == 0) throw ConfigError("hop counts must be positive");
    if (e.jobs == 0) throw ConfigError("evaluate.jobs must be positive");
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

json cohort_json(const cohort::CohortConfig& c) {
    return {{"n_stays", c.n_stays},         {"case_fraction", c.case_fraction},
            {"subtype_mixture", c.subtype_mixture}, {"vocab_size", c.vocab_size},
            {"noise_scale", c.noise_scale}, {"complementarity", c.complementarity},
            {"note_signal", c.note_signal}, {"missing_rate", c.missing_rate}};
}

json hyper_json(const model::HyperConfig& h) {
    return {{"memory_size", h.memory_size}, {"emb_dim", h.emb_dim},       {"word_dim", h.word_dim},
            {"bottom_hidden", h.bottom_hidden}, {"top_hidden", h.top_hidden}, {"static_dim", h.static_dim},
            {"static_proj", h.static_proj}, {"hops", h.hops},             {"batch_size", h.batch_size},
            {"learning_rate", h.learning_rate}, {"epochs", h.epochs},     {"init_scale", h.init_scale}};
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"schema_version", "seed", "t1_hours", "t2_days", "output_dir", "cohort_path", "cohort", "model",
                    "hyper", "max_note_len", "vocab_min_count", "k_range", "cluster", "evaluate"},
                   "config");
    if (!j.contains("schema_version")) throw ConfigError("config lacks schema_version");
    RunConfig c;
    read(j, "schema_version", c.schema_version);
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    read(j, "t1_hours", c.t1_hours);
    read(j, "t2_days", c.t2_days);
    std::string out = c.output_dir.string();
    read(j, "output_dir", out);
    c.output_dir = out;
    if (j.contains("cohort_path") && !j.at("cohort_path").is_null()) {
        std::string p;
        read(j, "cohort_path", p);
        c.cohort_path = p;
    }
    if (j.contains("cohort")) {
        const auto& cj = j.at("cohort");
        reject_unknown(cj,
                       {"n_stays", "case_fraction", "subtype_mixture", "vocab_size", "noise_scale",
                        "complementarity", "note_signal", "missing_rate"},
                       "cohort");
        read(cj, "n_stays", c.cohort.n_stays);
        read(cj, "case_fraction", c.cohort.case_fraction);
        read(cj, "subtype_mixture", c.cohort.subtype_mixture);
        read(cj, "vocab_size", c.cohort.vocab_size);
        read(cj, "noise_scale", c.cohort.noise_scale);
        read(cj, "complementarity", c.cohort.complementarity);
        read(cj, "note_signal", c.cohort.note_signal);
        read(cj, "missing_rate", c.cohort.missing_rate);
    }
    read(j, "model", c.model);
    bool memory_given = false;
    if (j.contains("hyper")) {
        const auto& hj = j.at("hyper");
        reject_unknown(hj,
                       {"memory_size", "emb_dim", "word_dim", "bottom_hidden", "top_hidden", "static_dim",
                        "static_proj", "hops", "batch_size", "learning_rate", "epochs", "init_scale"},
                       "hyper");
        memory_given = hj.contains("memory_size");
        read(hj, "memory_size", c.hyper.memory_size);
        read(hj, "emb_dim", c.hyper.emb_dim);
        read(hj, "word_dim", c.hyper.word_dim);
        read(hj, "bottom_hidden", c.hyper.bottom_hidden);
        read(hj, "top_hidden", c.hyper.top_hidden);
        read(hj, "static_dim", c.hyper.static_dim);
        read(hj, "static_proj", c.hyper.static_proj);
        read(hj, "hops", c.hyper.hops);
        read(hj, "batch_size", c.hyper.batch_size);
        read(hj, "learning_rate", c.hyper.learning_rate);
        read(hj, "epochs", c.hyper.epochs);
        read(hj, "init_scale", c.hyper.init_scale);
    }
    if (!memory_given) apply_t1(c, c.t1_hours);
    read(j, "max_note_len", c.max_note_len);
    read(j, "vocab_min_count", c.vocab_min_count);
    read(j, "k_range", c.k_range);
    if (j.contains("cluster")) {
        const auto& cj = j.at("cluster");
        reject_unknown(cj, {"perplexity", "tsne_iterations", "restarts", "autoencoder_epochs"}, "cluster");
        read(cj, "perplexity", c.cluster.perplexity);
        read(cj, "tsne_iterations", c.cluster.tsne_iterations);
        read(cj, "restarts", c.cluster.restarts);
        read(cj, "autoencoder_epochs", c.cluster.autoencoder_epochs);
    }
    if (j.contains("evaluate")) {
        const auto& ej = j.at("evaluate");
        reject_unknown(ej,
                       {"models", "outer_folds", "inner_folds", "lr_multipliers", "hops", "lr_l2", "lr_epochs",
                        "jobs"},
                       "evaluate");
        read(ej, "models", c.evaluate.models);
        read(ej, "outer_folds", c.evaluate.outer_folds);
        read(ej, "inner_folds", c.evaluate.inner_folds);
        read(ej, "lr_multipliers", c.evaluate.lr_multipliers);
        read(ej, "hops", c.evaluate.hops);
        read(ej, "lr_l2", c.evaluate.lr_l2);
        read(ej, "lr_epochs", c.evaluate.lr_epochs);
        read(ej, "jobs", c.evaluate.jobs);
    }
    std::uint64_t seed = c.seed;
    read(j, "seed", seed);
    apply_seed(c, seed);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const RunConfig& c) {
    json j = {{"schema_version", c.schema_version},
              {"seed", c.seed},
              {"t1_hours", c.t1_hours},
              {"t2_days", c.t2_days},
              {"output_dir", c.output_dir.string()},
              {"cohort_path", c.cohort_path ? json(c.cohort_path->string()) : json(nullptr)},
              {"cohort", cohort_json(c.cohort)},
              {"model", c.model},
              {"hyper", hyper_json(c.hyper)},
              {"max_note_len", c.max_note_len},
              {"vocab_min_count", c.vocab_min_count},
              {"k_range", c.k_range},
              {"cluster",
               {{"perplexity", c.cluster.perplexity},
                {"tsne_iterations", c.cluster.tsne_iterations},
                {"restarts", c.cluster.restarts},
                {"autoencoder_epochs", c.cluster.autoencoder_epochs}}},
              {"evaluate",
               {{"models", c.evaluate.models},
                {"outer_folds", c.evaluate.outer_folds},
                {"inner_folds", c.evaluate.inner_folds},
                {"lr_multipliers", c.evaluate.lr_multipliers},
                {"hops", c.evaluate.hops},
                {"lr_l2", c.evaluate.lr_l2},
                {"lr_epochs", c.evaluate.lr_epochs},
                {"jobs", c.evaluate.jobs}}}};
    return j.dump(2);
}

}  // namespace akisub::pipeline
