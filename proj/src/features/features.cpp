#include "akisub/features/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"

namespace akisub::features {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t bin_count(double t1_hours) {
    const double t = t1_hours / kBinHours;
    if (!(t >= 1.0) || std::floor(t) != t) {
        throw ArgumentError("observation window must be a positive multiple of 2 hours");
    }
    return static_cast<std::size_t>(t);
}

// Observations of every structured variable, urine converted to a rate.
std::vector<cohort::EventSeries> stay_series(const IcuStay& stay) {
    std::vector<cohort::EventSeries> out;
    for (const auto& spec : cohort::structured_variables()) {
        const std::string name(spec.name);
        if (name == cohort::kUrine) {
            out.push_back(cohort::urine_rate_series(stay));
        } else if (const auto* s = stay.series(name)) {
            out.push_back(*s);
        } else {
            out.push_back({name, {}});
        }
    }
    for (const auto* group : {&stay.chart_series, &stay.lab_series}) {
        for (const auto& [name, s] : *group) {
            if (!cohort::variable_index(name)) throw SchemaError("unknown variable id '" + name + "'");
        }
    }
    return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) return 0.0;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

StayTensor bin_events(const IcuStay& stay, double t1_hours) {
    const std::size_t t = bin_count(t1_hours);
    const auto series = stay_series(stay);
    const std::size_t d = series.size();
    StayTensor out{Tensor({t, d}), std::vector<std::uint8_t>(t * d, 0), false};
    std::vector<double> sum(t * d, 0.0);
    std::vector<int> count(t * d, 0);
    for (std::size_t v = 0; v < d; ++v) {
        for (const auto& p : series[v].points) {
            if (p.offset_hours < 0.0 || p.offset_hours >= t1_hours) continue;
            const auto j = std::min(t - 1, static_cast<std::size_t>(p.offset_hours / kBinHours));
            sum[j * d + v] += p.value;
            ++count[j * d + v];
        }
    }
    for (std::size_t k = 0; k < t * d; ++k) {
        if (count[k] > 0) {
            out.values[k] = sum[k] / count[k];
            out.mask[k] = 1;
        }
    }
    return out;
}

ScalingStats fit_scaling(const std::vector<StayTensor>& training, const std::string& split_id) {
    if (training.empty()) throw ImputationError("no training tensors to fit scaling statistics");
    const std::size_t d = training.front().d();
    ScalingStats stats{split_id, std::vector<double>(d, 0.0),
                       std::vector<double>(d, std::numeric_limits<double>::infinity()),
                       std::vector<double>(d, -std::numeric_limits<double>::infinity())};
    std::vector<std::size_t> n(d, 0);
    for (const auto& x : training) {
        if (x.d() != d) throw DimensionError("stay tensors disagree on the variable count");
        if (x.scaled) throw ContractError("scaling statistics must be fit on unscaled tensors");
        for (std::size_t j = 0; j < x.t(); ++j) {
            for (std::size_t v = 0; v < d; ++v) {
                if (!x.observed(j, v)) continue;
                const double val = x.values.at(j, v);
                stats.mean[v] += val;
                stats.min[v] = std::min(stats.min[v], val);
                stats.max[v] = std::max(stats.max[v], val);
                ++n[v];
            }
        }
    }
    const auto vars = cohort::structured_variables();
    for (std::size_t v = 0; v < d; ++v) {
        if (n[v] == 0) {
            const std::string name = v < vars.size() ? std::string(vars[v].name) : std::to_string(v);
            throw ImputationError("variable '" + name + "' is never observed in the training split");
        }
        stats.mean[v] /= static_cast<double>(n[v]);
    }
    return stats;
}

StayTensor apply_scaling(const StayTensor& tensor, const ScalingStats& stats) {
    if (tensor.scaled) return tensor;
    const std::size_t d = tensor.d();
    if (stats.mean.size() != d) throw DimensionError("scaling statistics do not match the tensor width");
    StayTensor out = tensor;
    for (std::size_t j = 0; j < tensor.t(); ++j) {
        for (std::size_t v = 0; v < d; ++v) {
            double val = tensor.observed(j, v) ? tensor.values.at(j, v) : stats.mean[v];
            const double range = stats.max[v] - stats.min[v];
            val = range > 0.0 ? (val - stats.min[v]) / range : 0.0;
            out.values.at(j, v) = std::clamp(val, 0.0, 1.0);
        }
    }
    out.scaled = true;
    return out;
}

ScaledSplit impute_and_scale(const std::vector<StayTensor>& training, const std::string& split_id) {
    ScaledSplit out{{}, fit_scaling(training, split_id)};
    out.tensors.reserve(training.size());
    for (const auto& x : training) out.tensors.push_back(apply_scaling(x, out.stats));
    return out;
}

void require_split(const ScalingStats& stats, const std::string& expected_split) {
    if (stats.split_id != expected_split) {
        throw ContractError("scaling statistics fit on split '" + stats.split_id + "', expected '" +
                            expected_split + "'");
    }
}

std::vector<double> static_vector(const IcuStay& stay) {
    std::vector<double> v(kStaticDim, 0.0);
    v[0] = stay.age / 100.0;
    v[1 + static_cast<std::size_t>(stay.sex)] = 1.0;
    v[3 + static_cast<std::size_t>(stay.ethnicity)] = 1.0;
    for (std::size_t m = 0; m < 4; ++m) v[7 + m] = stay.med_flags[m] ? 1.0 : 0.0;
    for (std::size_t c = 0; c < 9; ++c) v[11 + c] = stay.comorbidity_flags[c] ? 1.0 : 0.0;
    return v;
}

std::vector<std::size_t> summary_variable_indices() {
    std::vector<std::size_t> out;
    const auto vars = cohort::structured_variables();
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].name != "INR" && vars[v].name != "PT") out.push_back(v);
    }
    return out;
}

std::vector<std::string> baseline_feature_names() {
    static const char* stats[kSummaryStats] = {"first", "last", "mean", "min", "max", "slope", "count"};
    std::vector<std::string> names;
    const auto vars = cohort::structured_variables();
    for (auto v : summary_variable_indices()) {
        for (auto s : stats) names.push_back(std::string(vars[v].name) + "_" + s);
    }
    for (const char* s : {"age", "female", "eth_black", "eth_asian", "eth_other"}) names.emplace_back(s);
    for (auto m : cohort::kMedicationNames) names.push_back("med_" + std::string(m));
    for (const char* s : {"cm_cardiac", "cm_vascular", "cm_diabetes", "cm_hepatic", "cm_burden"}) {
        names.emplace_back(s);
    }
    return names;
}

BaselineFeatures summarize_for_baselines(const IcuStay& stay, double t1_hours) {
    const std::size_t t = bin_count(t1_hours);
    const auto series = stay_series(stay);
    const auto binned = bin_events(stay, t1_hours);
    BaselineFeatures out{std::vector<double>(kBaselineDim, kNaN), std::vector<std::uint8_t>(kSummarySeries, 0)};
    std::size_t k = 0;
    for (auto v : summary_variable_indices()) {
        std::vector<double> vals;
        for (const auto& p : series[v].points) {
            if (p.offset_hours >= 0.0 && p.offset_hours < t1_hours) vals.push_back(p.value);
        }
        double* block = &out.values[k * kSummaryStats];
        block[6] = static_cast<double>(vals.size());
        if (vals.empty()) {
            out.missing[k] = 1;
        } else {
            block[0] = vals.front();
            block[1] = vals.back();
            block[2] = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
            block[3] = *std::min_element(vals.begin(), vals.end());
            block[4] = *std::max_element(vals.begin(), vals.end());
            std::vector<double> x, y;
            for (std::size_t j = 0; j < t; ++j) {
                if (binned.observed(j, v)) {
                    x.push_back(static_cast<double>(j));
                    y.push_back(binned.values.at(j, v));
                }
            }
            block[5] = least_squares_slope(x, y);
        }
        ++k;
    }
    double* s = &out.values[kSummarySeries * kSummaryStats];
    const auto& cm = stay.comorbidity_flags;
    s[0] = stay.age / 100.0;
    s[1] = stay.sex == cohort::Sex::female ? 1.0 : 0.0;
    s[2] = stay.ethnicity == cohort::Ethnicity::black ? 1.0 : 0.0;
    s[3] = stay.ethnicity == cohort::Ethnicity::asian ? 1.0 : 0.0;
    s[4] = stay.ethnicity == cohort::Ethnicity::other ? 1.0 : 0.0;
    for (std::size_t m = 0; m < 4; ++m) s[5 + m] = stay.med_flags[m] ? 1.0 : 0.0;
    // comorbidity order: chf, pv, htn, diabetes, liver, mi, cad, cirrhosis, jaundice
    s[9] = (cm[0] || cm[5] || cm[6]) ? 1.0 : 0.0;
    s[10] = (cm[1] || cm[2]) ? 1.0 : 0.0;
    s[11] = cm[3] ? 1.0 : 0.0;
    s[12] = (cm[4] || cm[7] || cm[8]) ? 1.0 : 0.0;
    s[13] = static_cast<double>(std::count(cm.begin(), cm.end(), true)) / 9.0;
    return out;
}

SummaryImputer fit_summary_imputer(const std::vector<BaselineFeatures>& training, const std::string& split_id) {
    SummaryImputer imp{split_id, std::vector<double>(kBaselineDim, 0.0)};
    std::vector<std::size_t> n(kBaselineDim, 0);
    for (const auto& f : training) {
        if (f.values.size() != kBaselineDim) throw DimensionError("baseline vector must have 147 entries");
        for (std::size_t i = 0; i < kBaselineDim; ++i) {
            if (std::isnan(f.values[i])) continue;
            imp.mean[i] += f.values[i];
            ++n[i];
        }
    }
    const auto names = baseline_feature_names();
    for (std::size_t i = 0; i < kBaselineDim; ++i) {
        if (n[i] == 0) throw ImputationError("baseline feature '" + names[i] + "' is never observed in training");
        imp.mean[i] /= static_cast<double>(n[i]);
    }
    return imp;
}

std::vector<double> impute_summary(const BaselineFeatures& features, const SummaryImputer& imputer) {
    if (features.values.size() != kBaselineDim || imputer.mean.size() != kBaselineDim) {
        throw DimensionError("baseline vector must have 147 entries");
    }
    std::vector<double> out = features.values;
    for (std::size_t i = 0; i < kBaselineDim; ++i) {
        if (std::isnan(out[i])) out[i] = imputer.mean[i];
    }
    return out;
}

NoteTokens note_tokens(const IcuStay& stay, double t1_hours) {
    std::vector<const cohort::ClinicalNote*> notes;
    for (const auto& n : stay.notes) {
        if (n.offset_hours < t1_hours) notes.push_back(&n);
    }
    std::stable_sort(notes.begin(), notes.end(),
                     [](const auto* a, const auto* b) { return a->offset_hours < b->offset_hours; });
    NoteTokens out;
    for (const auto* n : notes) out.push_back(n->tokens);
    return out;
}

std::vector<std::vector<int>> tokens_to_sequences(const NoteTokens& notes, const Vocabulary& vocab,
                                                  std::size_t max_note_len) {
    std::vector<std::vector<int>> out;
    for (const auto& n : notes) {
        std::vector<int> seq;
        for (const auto& tok : n) {
            if (auto idx = vocab.index(tok)) seq.push_back(*idx);
        }
        if (seq.empty()) seq.push_back(Vocabulary::kPad);
        if (max_note_len > 0) seq.resize(max_note_len, Vocabulary::kPad);
        out.push_back(std::move(seq));
    }
    if (out.empty()) {
        std::vector<int> seq{Vocabulary::kNull};
        if (max_note_len > 0) seq.resize(max_note_len, Vocabulary::kPad);
        out.push_back(std::move(seq));
    }
    return out;
}

std::vector<double> tokens_to_bow(const NoteTokens& notes, const Vocabulary& vocab) {
    std::vector<double> bow(vocab.size(), 0.0);
    for (const auto& n : notes) {
        for (const auto& tok : n) {
            if (auto idx = vocab.index(tok)) bow[static_cast<std::size_t>(*idx)] += 1.0;
        }
    }
    return bow;
}

std::vector<std::vector<int>> notes_to_sequences(const IcuStay& stay, const Vocabulary& vocab,
                                                 std::size_t max_note_len, double t1_hours) {
    return tokens_to_sequences(note_tokens(stay, t1_hours), vocab, max_note_len);
}

std::vector<double> notes_to_bow(const IcuStay& stay, const Vocabulary& vocab, double t1_hours) {
    return tokens_to_bow(note_tokens(stay, t1_hours), vocab);
}

}  // namespace akisub::features
