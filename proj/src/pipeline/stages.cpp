#include "akisub/pipeline/stages.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "akisub/clustering/autoencoder.hpp"
#include "akisub/clustering/pca.hpp"
#include "akisub/clustering/tsne.hpp"
#include "akisub/clustering/validity.hpp"
#include "akisub/cohort/cohort_io.hpp"
#include "akisub/error.hpp"
#include "akisub/model/checkpoint.hpp"
#include "akisub/pipeline/csv.hpp"
#include "akisub/pipeline/dataset.hpp"
#include "akisub/pipeline/manifest.hpp"
#include "akisub/pipeline/models.hpp"
#include "akisub/stats/report.hpp"

namespace akisub::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kCohort = "cohort.jsonl";
constexpr const char* kLabels = "labels.csv";
constexpr const char* kExclusions = "exclusions.csv";
constexpr const char* kFeatures = "features";
constexpr const char* kCheckpoint = "model/memnet.ckpt";
constexpr const char* kScaling = "model/scaling.json";
constexpr const char* kVocabulary = "model/vocabulary.txt";
constexpr const char* kLossHistory = "model/loss_history.csv";
constexpr const char* kRepresentations = "representations.csv";
constexpr const char* kClusters = "clusters.csv";
constexpr const char* kKSelection = "k_selection.csv";
constexpr const char* kBaselineClusters = "baseline_clusters.csv";
constexpr const char* kClusterQuality = "cluster_quality.csv";
constexpr const char* kReportCsv = "report.csv";
constexpr const char* kReportTxt = "report.txt";
constexpr const char* kHeatmap = "heatmap.csv";
constexpr const char* kStages = "stage_composition.csv";
constexpr const char* kMetricsFolds = "metrics_folds.csv";
constexpr const char* kMetricsTable = "metrics_table.csv";
constexpr const char* kTuning = "tuning.txt";
constexpr const char* kTrainSplit = "full";

std::vector<std::string> feature_files() {
    std::vector<std::string> out;
    for (const auto& f : dataset_files()) out.push_back(std::string(kFeatures) + "/" + f);
    return out;
}

struct Context {
    const RunConfig& config;
    fs::path out;
    std::ostream* log;

    fs::path at(const std::string& rel) const { return out / rel; }
    void note(const std::string& msg) const {
        if (log) *log << "  " << msg << '\n';
    }
};

struct StageSpec {
    std::string name;
    std::vector<std::pair<std::string, std::string>> inputs;  // (artifact, producing stage)
    std::vector<std::string> outputs;
    std::function<json(const RunConfig&)> settings;  // the config fields the stage reads
    std::function<void(const Context&)> run;
};

std::vector<std::pair<std::string, std::string>> from(const std::string& stage, const std::vector<std::string>& files) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : files) out.emplace_back(f, stage);
    return out;
}

template <typename... Parts>
std::vector<std::pair<std::string, std::string>> join(Parts... parts) {
    std::vector<std::pair<std::string, std::string>> out;
    (out.insert(out.end(), parts.begin(), parts.end()), ...);
    return out;
}

json config_json(const RunConfig& c) { return json::parse(config_to_json(c)); }

// ---- synth ---------------------------------------------------------------

void run_synth(const Context& ctx) {
    std::vector<cohort::IcuStay> stays;
    if (ctx.config.cohort_path) {
        stays = cohort::read_cohort(*ctx.config.cohort_path);
        ctx.note("read " + std::to_string(stays.size()) + " stays from " + ctx.config.cohort_path->string());
    } else {
        stays = cohort::generate_cohort(ctx.config.cohort);
        ctx.note("generated " + std::to_string(stays.size()) + " stays");
    }
    cohort::write_cohort(stays, ctx.at(kCohort));
}

// ---- label ---------------------------------------------------------------

kdigo::ExclusionResult labeled_cohort(const Context& ctx) {
    return kdigo::apply_exclusions(cohort::read_cohort(ctx.at(kCohort)), ctx.config.t1_hours, ctx.config.t2_days);
}

void run_label(const Context& ctx) {
    const auto res = labeled_cohort(ctx);
    const kdigo::Window window{ctx.config.t1_hours, ctx.config.t1_hours + 24.0 * ctx.config.t2_days};
    CsvTable t{{"stay_id", "patient_id", "is_case", "onset_hours", "stage", "rule", "baseline_scr", "planted_subtype"},
               {}};
    std::size_t cases = 0;
    for (const auto& ls : res.kept) {
        const auto& l = ls.label;
        std::string stage;
        if (l.is_case) {
            ++cases;
            stage = std::to_string(kdigo::stage_aki(cohort::creatinine_series(ls.stay),
                                                    cohort::urine_rate_series(ls.stay), ls.baseline, window,
                                                    ls.stay.rrt_flag));
        }
        t.rows.push_back({ls.stay.stay_id, ls.stay.patient_id, l.is_case ? "1" : "0",
                          l.onset_offset_hours ? format_double(*l.onset_offset_hours) : "", stage,
                          l.triggering_rule ? std::string(kdigo::to_string(*l.triggering_rule)) : "",
                          ls.baseline ? format_double(ls.baseline->value) : "",
                          ls.stay.planted_subtype ? std::to_string(*ls.stay.planted_subtype) : ""});
    }
    write_csv(t, ctx.at(kLabels));
    kdigo::write_exclusion_log(res.log, ctx.at(kExclusions));
    ctx.note(std::to_string(res.kept.size()) + " stays kept (" + std::to_string(cases) + " cases), " +
             std::to_string(res.log.size()) + " excluded");
}

// ---- featurize -----------------------------------------------------------

void run_featurize(const Context& ctx) {
    const auto res = labeled_cohort(ctx);
    const auto labels = read_csv(ctx.at(kLabels));
    const auto id_col = labels.column("stay_id");
    const auto case_col = labels.column("is_case");
    if (labels.rows.size() != res.kept.size()) throw DataError("labels.csv does not match the cohort; rerun label");
    for (std::size_t i = 0; i < res.kept.size(); ++i) {
        if (labels.rows[i][id_col] != res.kept[i].stay.stay_id ||
            (labels.rows[i][case_col] == "1") != res.kept[i].label.is_case)
            throw DataError("labels.csv does not match the cohort at stay '" + res.kept[i].stay.stay_id + "'");
    }
    const auto data = build_dataset(res.kept, ctx.config.t1_hours, ctx.config.t2_days);
    write_dataset(data, ctx.at(kFeatures));
    ctx.note(std::to_string(data.stays.size()) + " feature rows");
}

// ---- train ---------------------------------------------------------------

std::vector<std::size_t> all_rows(const Dataset& data) {
    std::vector<std::size_t> rows(data.stays.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

void write_scaling(const features::ScalingStats& s, const fs::path& path) {
    json j = {{"split_id", s.split_id}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

features::ScalingStats read_scaling(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    try {
        json j = json::parse(in);
        return {j.at("split_id").get<std::string>(), j.at("mean").get<std::vector<double>>(),
                j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>()};
    } catch (const json::exception& e) {
        throw ParseError("malformed scaling file: " + std::string(e.what()));
    }
}

void write_vocabulary(const features::Vocabulary& v, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (std::size_t i = 2; i < v.size(); ++i) out << v.word(i) << '\n';
}

features::Vocabulary read_vocabulary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::vector<std::string> words;
    for (std::string w; std::getline(in, w);)
        if (!w.empty()) words.push_back(w);
    return features::Vocabulary(words);
}

void run_train(const Context& ctx) {
    const auto data = read_dataset(ctx.at(kFeatures));
    const auto rows = all_rows(data);
    const auto stats = fit_scaling(data, rows, kTrainSplit);
    const auto vocab = fit_vocabulary(data, rows, ctx.config.vocab_min_count);
    const auto inputs = make_inputs(data, rows, stats, kTrainSplit, vocab, ctx.config.max_note_len);
    const auto fit = model::train(inputs, data.labels(), ctx.config.hyper, vocab.size());
    fs::create_directories(ctx.at("model"));
    model::save_memnet(fit.model, ctx.at(kCheckpoint));
    write_scaling(stats, ctx.at(kScaling));
    write_vocabulary(vocab, ctx.at(kVocabulary));
    CsvTable loss{{"epoch", "mean_loss"}, {}};
    for (std::size_t e = 0; e < fit.loss_history.size(); ++e)
        loss.rows.push_back({std::to_string(e + 1), format_double(fit.loss_history[e])});
    write_csv(loss, ctx.at(kLossHistory));
    ctx.note("trained on " + std::to_string(rows.size()) + " stays, final loss " +
             format_double(fit.loss_history.empty() ? NAN : fit.loss_history.back()));
}

// ---- embed ---------------------------------------------------------------

void run_embed(const Context& ctx) {
    const auto data = read_dataset(ctx.at(kFeatures));
    const auto net = model::load_memnet(ctx.at(kCheckpoint));
    const auto stats = read_scaling(ctx.at(kScaling));
    const auto vocab = read_vocabulary(ctx.at(kVocabulary));
    if (vocab.size() != net.vocab_size) throw DataError("vocabulary does not match the checkpoint");
    const auto inputs = make_inputs(data, all_rows(data), stats, kTrainSplit, vocab, ctx.config.max_note_len);
    const auto reps = model::embed_stays(net, inputs);
    const auto proba = model::predict_proba(net, inputs);
    CsvTable t{{"stay_id", "label", "p_case"}, {}};
    for (std::size_t c = 0; c < reps.cols(); ++c) t.header.push_back("r" + std::to_string(c));
    for (std::size_t i = 0; i < data.stays.size(); ++i) {
        std::vector<std::string> row{data.stays[i].stay_id, std::to_string(data.stays[i].label),
                                     format_double(proba[i])};
        for (std::size_t c = 0; c < reps.cols(); ++c) row.push_back(format_double(reps.at(i, c)));
        t.rows.push_back(std::move(row));
    }
    write_csv(t, ctx.at(kRepresentations));
    ctx.note(std::to_string(reps.rows()) + " representations of width " + std::to_string(reps.cols()));
}

// ---- cluster -------------------------------------------------------------

// Relabels clusters by decreasing size, ties by first member.
std::vector<int> canonical_labels(const std::vector<int>& labels, std::size_t k) {
    std::vector<std::size_t> size(k, 0), first(k, labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto c = static_cast<std::size_t>(labels[i]);
        ++size[c];
        first[c] = std::min(first[c], i);
    }
    std::vector<std::size_t> order(k);
    for (std::size_t c = 0; c < k; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
    });
    std::vector<int> remap(k);
    for (std::size_t r = 0; r < k; ++r) remap[order[r]] = static_cast<int>(r);
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[static_cast<std::size_t>(labels[i])];
    return out;
}

struct CaseEmbedding {
    std::vector<std::string> ids;
    std::vector<std::optional<int>> planted;
    numeric::Tensor reps;
};

CaseEmbedding case_representations(const Context& ctx) {
    const auto reps = read_csv(ctx.at(kRepresentations));
    const auto stays = read_csv(ctx.at(std::string(kFeatures) + "/stays.csv"));
    std::map<std::string, std::optional<int>> planted;
    const auto pcol = stays.column("planted_subtype");
    for (const auto& r : stays.rows)
        planted[r[0]] = r[pcol].empty() ? std::nullopt : std::optional<int>(static_cast<int>(parse_double(r[pcol])));
    const auto lcol = reps.column("label");
    const std::size_t first = reps.column("r0");
    const std::size_t width = reps.header.size() - first;
    CaseEmbedding out;
    std::vector<double> values;
    for (const auto& r : reps.rows) {
        if (r[lcol] != "1") continue;
        out.ids.push_back(r[0]);
        out.planted.push_back(planted.count(r[0]) ? planted[r[0]] : std::nullopt);
        for (std::size_t c = first; c < r.size(); ++c) values.push_back(parse_double(r[c]));
    }
    if (out.ids.size() < 4) throw InsufficientDataError("clustering needs at least 4 case stays");
    out.reps = numeric::Tensor({out.ids.size(), width}, std::move(values));
    return out;
}

std::vector<std::size_t> feasible_k(const std::vector<std::size_t>& ks, std::size_t n) {
    std::vector<std::size_t> out;
    for (auto k : ks)
        if (k + 1 <= n) out.push_back(k);
    if (out.empty()) throw InsufficientDataError("no k in k_range fits " + std::to_string(n) + " case stays");
    return out;
}

void run_cluster(const Context& ctx) {
    const auto& cs = ctx.config.cluster;
    const auto cases = case_representations(ctx);
    const std::size_t n = cases.ids.size();
    const auto ks = feasible_k(ctx.config.k_range, n);

    clustering::TsneConfig tc;
    tc.perplexity = std::min(cs.perplexity, (static_cast<double>(n) - 1.0) / 3.0);
    tc.iterations = cs.tsne_iterations;
    tc.seed = ctx.config.seed;
    if (tc.perplexity < cs.perplexity) ctx.note("perplexity capped at " + format_double(tc.perplexity));
    const auto ts = clustering::tsne(cases.reps, tc);
    const auto sel = clustering::select_k(ts.embedding, ks, ctx.config.seed, cs.restarts);
    const std::size_t best = static_cast<std::size_t>(
        std::find(sel.ks.begin(), sel.ks.end(), sel.best_k) - sel.ks.begin());
    const auto labels = canonical_labels(sel.assignments[best].labels, sel.best_k);

    CsvTable clusters{{"stay_id", "tsne_x", "tsne_y", "cluster"}, {}};
    for (std::size_t i = 0; i < n; ++i)
        clusters.rows.push_back({cases.ids[i], format_double(ts.embedding.at(i, 0)), format_double(ts.embedding.at(i, 1)),
                                 std::to_string(labels[i])});
    write_csv(clusters, ctx.at(kClusters));
    CsvTable ksel{{"k", "mcclain_rao", "inertia"}, {}};
    for (std::size_t i = 0; i < sel.ks.size(); ++i)
        ksel.rows.push_back({std::to_string(sel.ks[i]), format_double(sel.index[i]),
                             format_double(sel.assignments[i].inertia)});
    write_csv(ksel, ctx.at(kKSelection));

    // 2-D baselines clustered with their own k selection
    const auto pc = clustering::pca_project(cases.reps, 2);
    clustering::AutoencoderConfig ac;
    ac.epochs = cs.autoencoder_epochs;
    ac.seed = ctx.config.seed;
    const auto ae = clustering::autoencoder_embed(cases.reps, ac);
    const auto psel = clustering::select_k(pc, ks, ctx.config.seed, cs.restarts);
    const auto asel = clustering::select_k(ae, ks, ctx.config.seed, cs.restarts);
    auto chosen = [](const clustering::KSelection& s) {
        const auto i = static_cast<std::size_t>(std::find(s.ks.begin(), s.ks.end(), s.best_k) - s.ks.begin());
        return canonical_labels(s.assignments[i].labels, s.best_k);
    };
    const auto plab = chosen(psel);
    const auto alab = chosen(asel);
    CsvTable base{{"stay_id", "pca_x", "pca_y", "pca_cluster", "ae_x", "ae_y", "ae_cluster"}, {}};
    for (std::size_t i = 0; i < n; ++i)
        base.rows.push_back({cases.ids[i], format_double(pc.at(i, 0)), format_double(pc.at(i, 1)),
                             std::to_string(plab[i]), format_double(ae.at(i, 0)), format_double(ae.at(i, 1)),
                             std::to_string(alab[i])});
    write_csv(base, ctx.at(kBaselineClusters));

    const bool have_truth = std::all_of(cases.planted.begin(), cases.planted.end(), [](const auto& p) { return p.has_value(); });
    std::vector<int> truth;
    if (have_truth)
        for (const auto& p : cases.planted) truth.push_back(*p);
    CsvTable quality{{"method", "k", "mcclain_rao", "silhouette", "ari_planted"}, {}};
    auto add = [&](const std::string& method, const numeric::Tensor& emb, const std::vector<int>& lab, std::size_t k) {
        quality.rows.push_back({method, std::to_string(k), format_double(clustering::mcclain_rao(emb, lab, k)),
                                format_double(clustering::silhouette(emb, lab)),
                                have_truth ? format_double(clustering::adjusted_rand_index(lab, truth)) : ""});
    };
    add("tsne", ts.embedding, labels, sel.best_k);
    add("pca", pc, plab, psel.best_k);
    add("autoencoder", ae, alab, asel.best_k);
    write_csv(quality, ctx.at(kClusterQuality));
    ctx.note(std::to_string(n) + " cases, selected k = " + std::to_string(sel.best_k));
}

// ---- interpret -----------------------------------------------------------

void run_interpret(const Context& ctx) {
    const auto clusters = read_csv(ctx.at(kClusters));
    const auto stays_tab = read_csv(ctx.at(std::string(kFeatures) + "/stays.csv"));
    const auto cohort = cohort::read_cohort(ctx.at(kCohort));
    std::map<std::string, const cohort::IcuStay*> by_id;
    for (const auto& s : cohort) by_id[s.stay_id] = &s;
    std::map<std::string, int> stage_of;
    const auto scol = stays_tab.column("stage");
    for (const auto& r : stays_tab.rows)
        if (!r[scol].empty()) stage_of[r[0]] = static_cast<int>(parse_double(r[scol]));
    std::vector<cohort::IcuStay> members;
    std::vector<int> labels, stages;
    std::size_t k = 0;
    const auto ccol = clusters.column("cluster");
    for (const auto& r : clusters.rows) {
        auto it = by_id.find(r[0]);
        if (it == by_id.end()) throw DataError("clustered stay '" + r[0] + "' missing from the cohort");
        auto st = stage_of.find(r[0]);
        if (st == stage_of.end()) throw DataError("clustered stay '" + r[0] + "' has no KDIGO stage");
        members.push_back(*it->second);
        labels.push_back(static_cast<int>(parse_double(r[ccol])));
        stages.push_back(st->second);
        k = std::max(k, static_cast<std::size_t>(labels.back()) + 1);
    }
    const auto report = stats::build_subtype_report(members, labels, std::min(24.0, ctx.config.t1_hours));
    stats::write_report_csv(report, ctx.at(kReportCsv));
    stats::write_report_table(report, ctx.at(kReportTxt));
    stats::write_heatmap_csv(report, ctx.at(kHeatmap));
    stats::write_stage_composition_csv(stats::stage_composition(labels, stages, k), ctx.at(kStages));
    ctx.note(std::to_string(report.rows.size()) + " report rows over " + std::to_string(k) + " clusters");
}

// ---- evaluate ------------------------------------------------------------

void run_evaluate(const Context& ctx) {
    const auto data = read_dataset(ctx.at(kFeatures));
    const auto models = make_cv_models(data, ctx.config);
    CvOptions opt;
    opt.outer_folds = ctx.config.evaluate.outer_folds;
    opt.inner_folds = ctx.config.evaluate.inner_folds;
    opt.seed = ctx.config.seed;
    opt.jobs = ctx.config.evaluate.jobs;
    const auto res = nested_cv(data.labels(), data.groups(), models, opt);
    CsvTable folds{{"model", "fold", "auc", "precision", "recall", "precision_undefined"}, {}};
    for (const auto& r : res.records)
        folds.rows.push_back({r.model, std::to_string(r.fold), format_double(r.auc), format_double(r.precision),
                              format_double(r.recall), r.precision_undefined ? "1" : "0"});
    write_csv(folds, ctx.at(kMetricsFolds));
    CsvTable table{{"model", "auc", "precision", "recall"}, {}};
    for (const auto& s : res.summary)
        table.rows.push_back({s.model, mean_sd(s.auc_mean, s.auc_sd), mean_sd(s.precision_mean, s.precision_sd),
                              mean_sd(s.recall_mean, s.recall_sd)});
    write_csv(table, ctx.at(kMetricsTable));
    std::ofstream tuning(ctx.at(kTuning), std::ios::binary);
    for (const auto& c : res.chosen) tuning << c << '\n';
    for (const auto& s : res.summary) ctx.note(s.model + " auc " + mean_sd(s.auc_mean, s.auc_sd));
}

const std::vector<StageSpec>& specs() {
    static const std::vector<StageSpec> all = [] {
        const auto feats = from("featurize", feature_files());
        const auto model_files = from("train", {kCheckpoint, kScaling, kVocabulary});
        std::vector<StageSpec> s;
        s.push_back({"synth", {}, {kCohort},
                     [](const RunConfig& c) {
                         json j = config_json(c);
                         return json{{"cohort", j["cohort"]}, {"cohort_path", j["cohort_path"]}, {"seed", c.seed}};
                     },
                     run_synth});
        s.push_back({"label", from("synth", {kCohort}), {kLabels, kExclusions},
                     [](const RunConfig& c) { return json{{"t1", c.t1_hours}, {"t2", c.t2_days}}; }, run_label});
        s.push_back({"featurize", join(from("synth", {kCohort}), from("label", {kLabels})), feature_files(),
                     [](const RunConfig& c) { return json{{"t1", c.t1_hours}, {"t2", c.t2_days}}; }, run_featurize});
        s.push_back({"train", feats, {kCheckpoint, kScaling, kVocabulary, kLossHistory},
                     [](const RunConfig& c) {
                         json j = config_json(c);
                         return json{{"hyper", j["hyper"]}, {"model", c.model}, {"seed", c.seed},
                                     {"max_note_len", c.max_note_len}, {"vocab_min_count", c.vocab_min_count}};
                     },
                     run_train});
        s.push_back({"embed", join(feats, model_files), {kRepresentations},
                     [](const RunConfig& c) { return json{{"max_note_len", c.max_note_len}}; }, run_embed});
        s.push_back({"cluster",
                     join(from("embed", {kRepresentations}), from("featurize", {std::string(kFeatures) + "/stays.csv"})),
                     {kClusters, kKSelection, kBaselineClusters, kClusterQuality},
                     [](const RunConfig& c) {
                         json j = config_json(c);
                         return json{{"k_range", c.k_range}, {"cluster", j["cluster"]}, {"seed", c.seed}};
                     },
                     run_cluster});
        s.push_back({"interpret",
                     join(from("synth", {kCohort}), from("featurize", {std::string(kFeatures) + "/stays.csv"}),
                          from("cluster", {kClusters})),
                     {kReportCsv, kReportTxt, kHeatmap, kStages},
                     [](const RunConfig& c) { return json{{"t1", c.t1_hours}}; }, run_interpret});
        s.push_back({"evaluate", feats, {kMetricsFolds, kMetricsTable, kTuning},
                     [](const RunConfig& c) {
                         json j = config_json(c);
                         return json{{"evaluate", j["evaluate"]}, {"hyper", j["hyper"]}, {"seed", c.seed},
                                     {"max_note_len", c.max_note_len}, {"vocab_min_count", c.vocab_min_count}};
                     },
                     run_evaluate});
        return s;
    }();
    return all;
}

const StageSpec& find_spec(const std::string& name) {
    for (const auto& s : specs())
        if (s.name == name) return s;
    throw ConfigError("unknown stage '" + name + "'");
}

}  // namespace

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& s : specs()) n.push_back(s.name);
        return n;
    }();
    return names;
}

std::vector<std::string> stage_outputs(const std::string& stage) { return find_spec(stage).outputs; }

fs::path manifest_path(const RunConfig& config, const std::string& stage) {
    return config.output_dir / "manifests" / (stage + ".json");
}

StageOutcome run_stage(const std::string& stage, const RunConfig& config, std::ostream* log, bool force) {
    validate(config);
    const auto& spec = find_spec(stage);
    const Context ctx{config, config.output_dir, log};

    Manifest m;
    m.stage = spec.name;
    m.config_hash = hex64(fnv1a(spec.settings(config).dump()));
    m.seeds = {{"master", config.seed}};
    std::set<std::string> checked;
    for (const auto& [artifact, producer] : spec.inputs) {
        if (checked.insert(producer).second && !fs::exists(manifest_path(config, producer))) {
            throw DependencyError("stage '" + stage + "' needs '" + artifact + "' from stage '" + producer +
                                  "', which has not completed");
        }
        if (!fs::exists(ctx.at(artifact)))
            throw DependencyError("stage '" + stage + "' needs missing artifact '" + artifact + "' (stage '" + producer +
                                  "')");
        m.inputs[artifact] = hash_file(ctx.at(artifact));
    }
    if (config.cohort_path && stage == "synth") m.inputs[config.cohort_path->string()] = hash_file(*config.cohort_path);

    const auto mpath = manifest_path(config, stage);
    if (!force) {
        if (auto old = read_manifest(mpath);
            old && old->config_hash == m.config_hash && old->inputs == m.inputs && old->seeds == m.seeds) {
            bool intact = true;
            for (const auto& [path, hash] : old->outputs) {
                if (!fs::exists(ctx.at(path)) || hash_file(ctx.at(path)) != hash) {
                    intact = false;
                    break;
                }
            }
            if (intact && old->outputs.size() == spec.outputs.size()) {
                if (log) *log << "[" << stage << "] up to date, skipped\n";
                return {stage, true};
            }
        }
    }
    if (log) *log << "[" << stage << "] running\n";
    fs::create_directories(config.output_dir);
    fs::remove(mpath);
    spec.run(ctx);
    for (const auto& out : spec.outputs) m.outputs[out] = hash_file(ctx.at(out));
    write_manifest(m, mpath);
    return {stage, false};
}

std::vector<StageOutcome> run_all(const RunConfig& config, std::ostream* log, bool force) {
    std::vector<StageOutcome> out;
    for (const auto& s : stage_names()) out.push_back(run_stage(s, config, log, force));
    return out;
}

}  // namespace akisub::pipeline
