#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "akisub/cohort/generator.hpp"
#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"
#include "akisub/features/features.hpp"
#include "akisub/features/vocabulary.hpp"

using namespace akisub;
using namespace akisub::features;
using cohort::IcuStay;

namespace {

IcuStay bare_stay() {
    IcuStay s;
    s.stay_id = "S1";
    s.patient_id = "P1";
    s.age = 60.0;
    s.weight_kg = 80.0;
    s.los_hours = 200.0;
    return s;
}

void put(IcuStay& s, const std::string& var, std::vector<std::pair<double, double>> pts) {
    cohort::EventSeries series{var, {}};
    for (auto [t, v] : pts) series.points.push_back({t, v});
    const bool chart = cohort::variable_spec(var).group == cohort::VariableGroup::chart;
    (chart ? s.chart_series : s.lab_series)[var] = series;
}

std::size_t var_index(const std::string& name) { return *cohort::variable_index(name); }

std::size_t feature_index(const std::string& name) {
    const auto names = baseline_feature_names();
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

std::vector<StayTensor> cohort_tensors(std::size_t n, std::uint64_t seed) {
    cohort::CohortConfig cfg;
    cfg.n_stays = n;
    cfg.seed = seed;
    std::vector<StayTensor> out;
    for (const auto& s : cohort::generate_cohort(cfg)) out.push_back(bin_events(s, 24.0));
    return out;
}

}  // namespace

TEST_CASE("bin_events examples") {
    auto s = bare_stay();
    put(s, "HeartRate", {{0.5, 2.0}, {1.5, 4.0}, {9.0, 7.0}, {30.0, 1.0}});
    const auto x = bin_events(s, 24.0);
    CHECK(x.t() == 12);
    CHECK(x.d() == cohort::kStructuredVariableCount);
    const auto v = var_index("HeartRate");
    CHECK(x.observed(0, v));
    CHECK(x.values.at(0, v) == 3.0);
    CHECK_FALSE(x.observed(3, v));
    CHECK(x.observed(4, v));
    CHECK(bin_events(s, 48.0).t() == 24);
    CHECK_THROWS_AS(bin_events(s, 23.0), ArgumentError);

    // urine enters as a weight-normalised rate
    put(s, "Urine", {{3.0, 80.0}});
    CHECK(bin_events(s, 24.0).values.at(1, var_index("Urine")) == doctest::Approx(1.0));
}

TEST_CASE("impute_and_scale examples") {
    auto a = bare_stay(), b = bare_stay();
    put(a, "HeartRate", {{0.5, 0.0}, {20.5, 10.0}});
    put(b, "HeartRate", {{2.5, 5.0}});
    put(a, "SpO2", {{0.5, 5.0}});
    put(b, "SpO2", {{0.5, 5.0}, {6.5, 5.0}});
    // every other variable gets one constant observation so the fit succeeds
    for (const auto& spec : cohort::structured_variables()) {
        const std::string name(spec.name);
        if (name == "HeartRate" || name == "SpO2") continue;
        put(a, name, {{1.0, 1.0}});
        put(b, name, {{1.0, 1.0}});
    }
    const auto split = impute_and_scale({bin_events(a, 24.0), bin_events(b, 24.0)}, "fold0");
    const auto hr = var_index("HeartRate"), sp = var_index("SpO2");
    CHECK(split.stats.split_id == "fold0");
    for (const auto& t : split.tensors)
        for (std::size_t j = 0; j < t.t(); ++j) CHECK(t.values.at(j, sp) == 0.0);

    auto test = bare_stay();
    put(test, "HeartRate", {{0.5, 2.5}, {2.5, 12.0}, {4.5, -3.0}});
    const auto scaled = apply_scaling(bin_events(test, 24.0), split.stats);
    CHECK(scaled.values.at(0, hr) == doctest::Approx(0.25));
    CHECK(scaled.values.at(1, hr) == 1.0);
    CHECK(scaled.values.at(2, hr) == 0.0);
    // masked cell takes the training mean (0 + 10 + 5) / 3 -> 0.5
    CHECK(scaled.values.at(5, hr) == doctest::Approx(0.5));
    CHECK(scaled.scaled);
    CHECK(apply_scaling(scaled, split.stats) == scaled);
}

TEST_CASE("scaling invariants on generated stays") {
    const auto train = cohort_tensors(60, 2);
    const auto test = cohort_tensors(30, 3);
    const auto split = impute_and_scale(train, "train");
    const auto split2 = impute_and_scale(train, "train");
    CHECK(split.stats == split2.stats);
    for (const auto& t : test) {
        const auto s = apply_scaling(t, split.stats);
        for (double v : s.values.storage()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(apply_scaling(s, split.stats) == s);
    }
    CHECK_NOTHROW(require_split(split.stats, "train"));
    CHECK_THROWS_AS(require_split(split.stats, "outer0"), ContractError);
    std::vector<StayTensor> scaled_input{split.tensors.front()};
    CHECK_THROWS_AS(fit_scaling(scaled_input, "x"), ContractError);
}

TEST_CASE("fit_scaling needs every variable observed") {
    auto s = bare_stay();
    put(s, "HeartRate", {{0.5, 1.0}});
    CHECK_THROWS_AS(fit_scaling({bin_events(s, 24.0)}, "x"), ImputationError);
}

TEST_CASE("summary statistics") {
    CHECK(kBaselineDim == 147);
    CHECK(baseline_feature_names().size() == 147);
    auto s = bare_stay();
    put(s, "HeartRate", {{0.5, 1.0}, {2.5, 2.0}, {4.5, 3.0}});
    put(s, "Glucose", {{7.0, 4.2}});
    const auto f = summarize_for_baselines(s, 24.0);
    CHECK(f.values.size() == 147);
    const auto hr = feature_index("HeartRate_first");
    const std::vector<double> expect{1, 3, 2, 1, 3, 1, 3};
    for (std::size_t k = 0; k < 7; ++k) CHECK(f.values[hr + k] == doctest::Approx(expect[k]));
    const auto gl = feature_index("Glucose_first");
    const std::vector<double> single{4.2, 4.2, 4.2, 4.2, 4.2, 0.0, 1.0};
    for (std::size_t k = 0; k < 7; ++k) CHECK(f.values[gl + k] == doctest::Approx(single[k]));
    const auto bun = feature_index("BUN_count");
    CHECK(f.values[bun] == 0.0);
    CHECK(std::isnan(f.values[bun - 1]));
    CHECK(f.values[feature_index("age")] == doctest::Approx(0.6));
    CHECK(feature_index("INR_first") == 147);
}

TEST_CASE("summary imputer") {
    cohort::CohortConfig cfg;
    cfg.n_stays = 40;
    std::vector<BaselineFeatures> train;
    for (const auto& s : cohort::generate_cohort(cfg)) train.push_back(summarize_for_baselines(s, 24.0));
    const auto imp = fit_summary_imputer(train, "train");
    auto s = bare_stay();
    const auto filled = impute_summary(summarize_for_baselines(s, 24.0), imp);
    CHECK(filled.size() == 147);
    const auto hr = feature_index("HeartRate_mean");
    CHECK(filled[hr] == doctest::Approx(imp.mean[hr]));
    CHECK(filled[feature_index("HeartRate_count")] == 0.0);
    for (double v : filled) CHECK(std::isfinite(v));
}

TEST_CASE("note sequences") {
    const Vocabulary vocab({"lasix", "cabg", "stable"});
    auto s = bare_stay();
    s.notes.push_back({3.0, {"cabg", "stable", "zzz"}});
    s.notes.push_back({1.0, {"qqq", "rrr"}});
    s.notes.push_back({30.0, {"lasix"}});
    const auto seqs = notes_to_sequences(s, vocab, 0, 24.0);
    REQUIRE(seqs.size() == 2);
    CHECK(seqs[0] == std::vector<int>{Vocabulary::kPad});
    CHECK(seqs[1] == std::vector<int>{*vocab.index("cabg"), *vocab.index("stable")});
    for (const auto& seq : notes_to_sequences(s, vocab))
        for (int i : seq) {
            CHECK(i >= 0);
            CHECK(i < int(vocab.size()));
        }
    const auto padded = notes_to_sequences(s, vocab, 4, 24.0);
    CHECK(padded[1] == std::vector<int>{*vocab.index("cabg"), *vocab.index("stable"), 0, 0});
    CHECK(notes_to_sequences(bare_stay(), vocab) == std::vector<std::vector<int>>{{Vocabulary::kNull}});
}

TEST_CASE("bag of words") {
    const Vocabulary vocab({"lasix", "cabg", "stable"});
    auto s = bare_stay();
    CHECK(notes_to_bow(s, vocab) == std::vector<double>(vocab.size(), 0.0));
    s.notes.push_back({1.0, {"lasix", "cabg", "lasix", "oov"}});
    s.notes.push_back({2.0, {"lasix", "stable"}});
    const auto bow = notes_to_bow(s, vocab);
    CHECK(bow[*vocab.index("lasix")] == 3.0);
    CHECK(std::accumulate(bow.begin(), bow.end(), 0.0) == 5.0);
}

TEST_CASE("vocabulary fitting") {
    const auto v = fit_vocabulary({{"b", "a", "c"}, {"a", "b", "a"}, {"d"}}, 1);
    CHECK(v.words() == std::vector<std::string>{"<pad>", "<null>", "a", "b", "c", "d"});
    const auto v2 = fit_vocabulary({{"b", "a", "c"}, {"a", "b", "a"}, {"d"}}, 2);
    CHECK(v2.size() == 4);
    CHECK_FALSE(v2.index("c").has_value());
}

TEST_CASE("static vector") {
    auto s = bare_stay();
    s.sex = cohort::Sex::female;
    s.ethnicity = cohort::Ethnicity::asian;
    s.med_flags[1] = true;
    s.comorbidity_flags[8] = true;
    const auto v = static_vector(s);
    CHECK(v.size() == kStaticDim);
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(0.6 + 1 + 1 + 1 + 1));
}
