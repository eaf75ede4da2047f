#include "akisub/pipeline/dataset.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"
#include "akisub/pipeline/csv.hpp"

namespace akisub::pipeline {

namespace {

bool same_doubles(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::isnan(a[i]) && std::isnan(b[i])) continue;
        if (a[i] != b[i]) return false;
    }
    return true;
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

std::optional<int> parse_opt_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return static_cast<int>(parse_double(s));
}

std::vector<std::string> variable_names() {
    std::vector<std::string> out;
    for (const auto& v : cohort::structured_variables()) out.emplace_back(v.name);
    return out;
}

}  // namespace

bool operator==(const StayRecord& a, const StayRecord& b) {
    return a.stay_id == b.stay_id && a.patient_id == b.patient_id && a.label == b.label && a.stage == b.stage &&
           a.planted_subtype == b.planted_subtype && a.tensor.mask == b.tensor.mask &&
           a.tensor.values.shape() == b.tensor.values.shape() &&
           same_doubles(a.tensor.values.storage(), b.tensor.values.storage()) && a.static_features == b.static_features &&
           same_doubles(a.summary.values, b.summary.values) && a.summary.missing == b.summary.missing &&
           a.notes == b.notes;
}

std::vector<int> Dataset::labels() const {
    std::vector<int> out;
    for (const auto& s : stays) out.push_back(s.label);
    return out;
}

std::vector<std::string> Dataset::groups() const {
    std::vector<std::string> out;
    for (const auto& s : stays) out.push_back(s.patient_id);
    return out;
}

Dataset build_dataset(const std::vector<kdigo::LabeledStay>& labeled, double t1_hours, double t2_days) {
    Dataset data;
    data.t1_hours = t1_hours;
    const kdigo::Window window{t1_hours, t1_hours + 24.0 * t2_days};
    for (const auto& ls : labeled) {
        StayRecord r;
        r.stay_id = ls.stay.stay_id;
        r.patient_id = ls.stay.patient_id;
        r.label = ls.label.is_case ? 1 : 0;
        if (ls.label.is_case) {
            r.stage = kdigo::stage_aki(cohort::creatinine_series(ls.stay), cohort::urine_rate_series(ls.stay),
                                       ls.baseline, window, ls.stay.rrt_flag);
        }
        r.planted_subtype = ls.stay.planted_subtype;
        r.tensor = features::bin_events(ls.stay, t1_hours);
        r.static_features = features::static_vector(ls.stay);
        r.summary = features::summarize_for_baselines(ls.stay, t1_hours);
        r.notes = features::note_tokens(ls.stay, t1_hours);
        data.stays.push_back(std::move(r));
    }
    return data;
}

std::vector<std::string> dataset_files() {
    return {"stays.csv", "sequences.csv", "mask.csv", "static.csv", "summary.csv", "notes.csv"};
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
    const auto vars = variable_names();
    CsvTable stays{{"stay_id", "patient_id", "label", "stage", "planted_subtype", "t1_hours"}, {}};
    CsvTable seq{{"stay_id", "bin"}, {}};
    CsvTable mask{{"stay_id", "bin"}, {}};
    seq.header.insert(seq.header.end(), vars.begin(), vars.end());
    mask.header.insert(mask.header.end(), vars.begin(), vars.end());
    CsvTable stat{{"stay_id", "age", "male", "female", "eth_white", "eth_black", "eth_asian", "eth_other"}, {}};
    for (auto m : cohort::kMedicationNames) stat.header.push_back("med_" + std::string(m));
    for (auto c : cohort::kComorbidityNames) stat.header.push_back("cm_" + std::string(c));
    CsvTable summary{{"stay_id"}, {}};
    for (const auto& n : features::baseline_feature_names()) summary.header.push_back(n);
    CsvTable notes{{"stay_id", "note", "tokens"}, {}};
    for (const auto& s : data.stays) {
        stays.rows.push_back({s.stay_id, s.patient_id, std::to_string(s.label), opt_int(s.stage),
                              opt_int(s.planted_subtype), format_double(data.t1_hours)});
        for (std::size_t j = 0; j < s.tensor.t(); ++j) {
            std::vector<std::string> vr{s.stay_id, std::to_string(j)}, mr{s.stay_id, std::to_string(j)};
            for (std::size_t v = 0; v < s.tensor.d(); ++v) {
                const bool obs = s.tensor.observed(j, v);
                vr.push_back(obs ? format_double(s.tensor.values.at(j, v)) : std::string());
                mr.push_back(obs ? "1" : "0");
            }
            seq.rows.push_back(std::move(vr));
            mask.rows.push_back(std::move(mr));
        }
        std::vector<std::string> sr{s.stay_id};
        for (double x : s.static_features) sr.push_back(format_double(x));
        stat.rows.push_back(std::move(sr));
        std::vector<std::string> br{s.stay_id};
        for (double x : s.summary.values) br.push_back(format_double(x));
        summary.rows.push_back(std::move(br));
        for (std::size_t n = 0; n < s.notes.size(); ++n) {
            std::string joined;
            for (const auto& tok : s.notes[n]) joined += (joined.empty() ? "" : " ") + tok;
            notes.rows.push_back({s.stay_id, std::to_string(n), joined});
        }
    }
    std::filesystem::create_directories(dir);
    write_csv(stays, dir / "stays.csv");
    write_csv(seq, dir / "sequences.csv");
    write_csv(mask, dir / "mask.csv");
    write_csv(stat, dir / "static.csv");
    write_csv(summary, dir / "summary.csv");
    write_csv(notes, dir / "notes.csv");
}

Dataset read_dataset(const std::filesystem::path& dir) {
    const auto stays = read_csv(dir / "stays.csv");
    const auto seq = read_csv(dir / "sequences.csv");
    const auto mask = read_csv(dir / "mask.csv");
    const auto stat = read_csv(dir / "static.csv");
    const auto summary = read_csv(dir / "summary.csv");
    const auto notes = read_csv(dir / "notes.csv");
    const std::size_t d = cohort::kStructuredVariableCount;
    if (seq.header.size() != d + 2 || mask.header.size() != d + 2) throw SchemaError("sequence tables need 21 variables");
    if (stat.header.size() != features::kStaticDim + 1) throw SchemaError("static table width mismatch");
    if (summary.header.size() != features::kBaselineDim + 1) throw SchemaError("summary table width mismatch");

    Dataset data;
    std::map<std::string, std::size_t> at;
    for (const auto& row : stays.rows) {
        StayRecord r;
        r.stay_id = row[0];
        r.patient_id = row[1];
        r.label = static_cast<int>(parse_double(row[2]));
        r.stage = parse_opt_int(row[3]);
        r.planted_subtype = parse_opt_int(row[4]);
        data.t1_hours = parse_double(row[5]);
        if (!at.emplace(r.stay_id, data.stays.size()).second) throw DataError("duplicate stay '" + r.stay_id + "'");
        data.stays.push_back(std::move(r));
    }
    const auto t = static_cast<std::size_t>(data.t1_hours / features::kBinHours);
    auto find = [&](const std::string& id) -> StayRecord& {
        auto it = at.find(id);
        if (it == at.end()) throw DataError("feature row for unknown stay '" + id + "'");
        return data.stays[it->second];
    };
    for (auto& s : data.stays) {
        s.tensor = {numeric::Tensor({t, d}), std::vector<std::uint8_t>(t * d, 0), false};
    }
    if (seq.rows.size() != mask.rows.size()) throw DataError("sequence and mask tables differ in length");
    for (std::size_t i = 0; i < seq.rows.size(); ++i) {
        const auto& vr = seq.rows[i];
        const auto& mr = mask.rows[i];
        if (vr[0] != mr[0] || vr[1] != mr[1]) throw DataError("sequence and mask rows are misaligned");
        auto& s = find(vr[0]);
        const auto j = static_cast<std::size_t>(parse_double(vr[1]));
        if (j >= t) throw DataError("bin index out of range for '" + vr[0] + "'");
        for (std::size_t v = 0; v < d; ++v) {
            if (mr[v + 2] == "1") {
                s.tensor.mask[j * d + v] = 1;
                s.tensor.values.at(j, v) = parse_double(vr[v + 2]);
            }
        }
    }
    for (const auto& row : stat.rows) {
        auto& s = find(row[0]);
        for (std::size_t k = 1; k < row.size(); ++k) s.static_features.push_back(parse_double(row[k]));
    }
    const auto sidx = features::summary_variable_indices();
    for (const auto& row : summary.rows) {
        auto& s = find(row[0]);
        s.summary.values.clear();
        for (std::size_t k = 1; k < row.size(); ++k) s.summary.values.push_back(parse_double(row[k]));
        s.summary.missing.assign(features::kSummarySeries, 0);
        for (std::size_t k = 0; k < features::kSummarySeries; ++k) {
            // the count statistic is zero exactly when the series is missing
            s.summary.missing[k] = s.summary.values[k * features::kSummaryStats + 6] == 0.0 ? 1 : 0;
        }
    }
    for (const auto& row : notes.rows) {
        auto& s = find(row[0]);
        std::istringstream ss(row[2]);
        std::vector<std::string> toks;
        for (std::string w; ss >> w;) toks.push_back(w);
        s.notes.push_back(std::move(toks));
    }
    for (const auto& s : data.stays) {
        if (s.static_features.size() != features::kStaticDim || s.summary.values.size() != features::kBaselineDim)
            throw DataError("incomplete feature rows for '" + s.stay_id + "'");
    }
    return data;
}

features::Vocabulary fit_vocabulary(const Dataset& data, const std::vector<std::size_t>& rows,
                                    std::size_t min_count) {
    std::vector<std::vector<std::string>> docs;
    for (auto i : rows)
        for (const auto& n : data.stays.at(i).notes) docs.push_back(n);
    return features::fit_vocabulary(docs, min_count);
}

features::ScalingStats fit_scaling(const Dataset& data, const std::vector<std::size_t>& rows,
                                   const std::string& split_id) {
    std::vector<features::StayTensor> train;
    train.reserve(rows.size());
    for (auto i : rows) train.push_back(data.stays.at(i).tensor);
    return features::fit_scaling(train, split_id);
}

std::vector<model::StayInput> make_inputs(const Dataset& data, const std::vector<std::size_t>& rows,
                                          const features::ScalingStats& stats, const std::string& split_id,
                                          const features::Vocabulary& vocab, std::size_t max_note_len) {
    features::require_split(stats, split_id);
    std::vector<model::StayInput> out;
    out.reserve(rows.size());
    for (auto i : rows) {
        const auto& s = data.stays.at(i);
        out.push_back({s.stay_id, features::apply_scaling(s.tensor, stats).values, s.static_features,
                       features::tokens_to_sequences(s.notes, vocab, max_note_len)});
    }
    return out;
}

}  // namespace akisub::pipeline
