#include "akisub/cohort/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"

namespace akisub::cohort {

namespace {

using Rng = std::mt19937_64;

constexpr std::array<std::string_view, 40> kGenericWords = {
    "patient", "stable",  "denies",  "pain",     "monitor",   "continue", "plan",   "noted",
    "family",  "nursing", "alert",   "oriented", "vitals",    "overnight", "tolerating", "diet",
    "ambulating", "comfortable", "afebrile", "awake", "resting", "ordered", "labs", "reviewed",
    "chest",   "abdomen", "soft",    "lungs",    "clear",     "bilateral", "mild",  "sinus",
    "rhythm",  "intact",  "skin",    "warm",     "dry",       "follow",   "pending", "assessment"};

constexpr std::array<std::array<std::string_view, 8>, 3> kSignalWords = {{
    {"lasix", "insulin", "diuresis", "edema", "furosemide", "sliding", "scale", "glucose"},
    {"cabg", "wires", "pressors", "sepsis", "lactate", "intubated", "bypass", "levophed"},
    {"jaundiced", "dilantin", "labile", "cvp", "ci", "neuro", "hepatic", "seizure"},
}};

constexpr std::array<std::string_view, 8> kStopWords = {"the", "and", "with", "was",
                                                         "for", "of",  "to",   "on"};

// Flag prevalence by group: index 0 controls, 1..3 sub-phenotypes I..III.
constexpr std::array<std::array<double, 4>, 4> kMedRates = {{
    {0.10, 0.10, 0.08, 0.12},
    {0.1320, 0.1219, 0.10, 0.1408},
    {0.2544, 0.2485, 0.18, 0.2589},
    {0.1669, 0.1641, 0.14, 0.1719},
}};

constexpr std::array<std::array<double, 9>, 4> kComorbidityRates = {{
    {0.55, 0.13, 0.58, 0.28, 0.12, 0.11, 0.33, 0.08, 0.04},
    {0.6016, 0.1487, 0.6060, 0.3095, 0.1322, 0.1245, 0.3584, 0.0901, 0.0441},
    {0.6563, 0.1711, 0.6027, 0.4435, 0.1533, 0.1473, 0.4776, 0.1205, 0.0685},
    {0.6299, 0.1871, 0.5892, 0.4445, 0.1402, 0.1497, 0.4975, 0.1197, 0.0613},
}};

constexpr std::array<double, 4> kMaleRate = {0.56, 0.6431, 0.4613, 0.5485};
constexpr std::array<std::array<double, 4>, 4> kEthnicityRates = {{
    {0.40, 0.35, 0.12, 0.13},
    {0.2029, 0.5522, 0.1480, 0.0969},
    {0.1399, 0.6890, 0.1071, 0.0640},
    {0.2479, 0.5407, 0.1678, 0.0436},
}};
constexpr std::array<double, 4> kAgeMean = {62.0, 63.03, 66.81, 65.07};
constexpr std::array<double, 4> kAgeSd = {16.0, 17.25, 10.43, 11.32};

constexpr double kObservationSpan = 48.0;
constexpr double kGridHours = 2.0;
constexpr double kCreatinineCadence = 6.0;
constexpr double kRampHours = 24.0;
constexpr double kRepeatPatientRate = 0.15;
constexpr double kShortStayRate = 0.03;
constexpr double kOliguriaRate = 0.3;
constexpr double kControlSignalRate = 0.02;
constexpr double kStopWordRate = 0.1;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

bool bernoulli(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

template <std::size_t N>
std::size_t categorical(Rng& rng, const std::array<double, N>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = uniform(rng, 0.0, total);
    for (std::size_t i = 0; i < N; ++i) {
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    return N - 1;
}

std::string make_id(char prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%c%06zu", prefix, n);
    return buf;
}

struct StayPlan {
    bool is_case = false;
    int subtype = 0;  // 0 control, 1..3
    std::string patient_id;
    double age = 0.0;
    Sex sex = Sex::male;
    Ethnicity ethnicity = Ethnicity::white;
    std::uint64_t seed = 0;
};

// Stage-specific creatinine peak ratio relative to the stay baseline.
double draw_peak_ratio(Rng& rng, int stage, double baseline) {
    switch (stage) {
        case 1: return uniform(rng, 1.6, 1.8);
        case 2: {
            double r = uniform(rng, 2.2, 2.6);
            // stay below the absolute 4.0 mg/dL stage-3 threshold
            return std::max(2.1, std::min(r, 3.8 / baseline));
        }
        default: return uniform(rng, 3.2, 3.6);
    }
}

struct Oliguria {
    double rate;     // mL/kg/h
    int min_points;  // consecutive 2h slots
    int max_points;
};

Oliguria oliguria_for_stage(int stage) {
    switch (stage) {
        case 1: return {0.4, 3, 4};
        case 2: return {0.4, 7, 9};
        default: return {0.2, 13, 15};
    }
}

IcuStay generate_stay(const CohortConfig& config, const StayPlan& plan, std::size_t index,
                      const std::vector<std::string>& vocab) {
    Rng rng(plan.seed);
    IcuStay stay;
    stay.stay_id = make_id('S', index + 1);
    stay.patient_id = plan.patient_id;
    stay.age = plan.age;
    stay.sex = plan.sex;
    stay.ethnicity = plan.ethnicity;
    stay.weight_kg = std::clamp(80.0 + 15.0 * normal(rng), 45.0, 150.0);
    stay.los_hours = kDefaultLosHours;
    const int group = plan.subtype;  // 0 = control
    if (!plan.is_case && bernoulli(rng, kShortStayRate)) stay.los_hours = uniform(rng, 10.0, 23.0);

    for (std::size_t m = 0; m < 4; ++m) stay.med_flags[m] = bernoulli(rng, kMedRates[group][m]);
    for (std::size_t c = 0; c < 9; ++c) {
        stay.comorbidity_flags[c] = bernoulli(rng, kComorbidityRates[group][c]);
    }

    double structured_strength = 0.0;
    double note_strength = 0.0;
    int stage = 0;
    if (plan.is_case) {
        const double w = uniform(rng, 0.0, 1.0);
        structured_strength = 1.0 - config.complementarity * w;
        note_strength = 1.0 - config.complementarity * (1.0 - w);
        stage = planted_stage_for_subtype(plan.subtype);
        stay.planted_subtype = plan.subtype;
        stay.planted_stage = stage;
        stay.rrt_flag = plan.subtype == 2 && bernoulli(rng, 0.1);
    }

    const double ns = config.noise_scale;
    const double scr_cv = std::min(0.02, 0.05 * ns);
    const double urine_cv = std::min(0.05, 0.1 * ns);
    auto keep = [&](double) { return !bernoulli(rng, config.missing_rate); };

    double scr_baseline = 0.0;
    double urine_level = 0.0;
    for (const auto& spec : structured_variables()) {
        double mean = spec.control_mean;
        double sd = spec.control_sd;
        if (plan.is_case) {
            const auto k = static_cast<std::size_t>(plan.subtype - 1);
            mean = spec.control_mean + structured_strength * (spec.subtype_mean[k] - spec.control_mean);
            sd = spec.subtype_sd[k];
        }
        const double patient_sd = ns * sd;
        const double level = std::max(spec.lower_bound, mean + patient_sd * normal(rng));
        EventSeries series{std::string(spec.name), {}};
        const bool is_scr = spec.name == kCreatinine;
        const bool is_urine = spec.name == kUrine;
        if (is_scr) scr_baseline = level;
        if (is_urine) urine_level = level;
        for (int slot = 0; slot * kGridHours < kObservationSpan; ++slot) {
            const double t = slot * kGridHours + uniform(rng, 0.25, 1.75);
            const bool kept = keep(t);
            double value;
            if (is_scr) {
                value = level * (1.0 + scr_cv * normal(rng));
            } else if (is_urine) {
                value = std::max(spec.lower_bound, level * (1.0 + urine_cv * normal(rng))) * stay.weight_kg;
            } else {
                value = std::max(spec.lower_bound, level + 0.5 * patient_sd * normal(rng));
            }
            if (kept && t < stay.los_hours) series.points.push_back({t, value});
        }
        auto& target = spec.group == VariableGroup::chart ? stay.chart_series : stay.lab_series;
        target.emplace(series.variable, std::move(series));
    }

    // Prediction-window kidney trajectories.
    auto& scr = stay.lab_series.at(std::string(kCreatinine)).points;
    auto& urine = stay.lab_series.at(std::string(kUrine)).points;
    double onset = 0.0, peak_ratio = 1.0;
    if (plan.is_case) {
        onset = uniform(rng, 50.0, 140.0);
        peak_ratio = draw_peak_ratio(rng, stage, scr_baseline);
    }
    for (int slot = 0; kObservationSpan + slot * kCreatinineCadence < stay.los_hours; ++slot) {
        const double t = kObservationSpan + slot * kCreatinineCadence + uniform(rng, 0.5, 5.5);
        double ramp = plan.is_case ? std::clamp((t - onset) / kRampHours, 0.0, 1.0) : 0.0;
        const double value = scr_baseline * (1.0 + (peak_ratio - 1.0) * ramp) * (1.0 + scr_cv * normal(rng));
        if (keep(t) && t < stay.los_hours) scr.push_back({t, value});
    }
    int low_first = -1, low_count = 0;
    double low_rate = 0.0;
    if (plan.is_case && bernoulli(rng, kOliguriaRate)) {
        const Oliguria o = oliguria_for_stage(stage);
        const double start = onset + uniform(rng, 0.0, 12.0);
        low_first = static_cast<int>(std::ceil((start - kObservationSpan) / kGridHours));
        low_count = o.min_points + static_cast<int>(uniform(rng, 0.0, 1.0) * (o.max_points - o.min_points + 1));
        low_count = std::min(low_count, o.max_points);
        low_rate = o.rate;
    }
    for (int slot = 0; kObservationSpan + slot * kGridHours < stay.los_hours; ++slot) {
        const double t = kObservationSpan + slot * kGridHours + uniform(rng, 0.25, 1.75);
        double rate = std::max(0.55, urine_level * (1.0 + urine_cv * normal(rng)));
        if (slot >= low_first && slot < low_first + low_count) {
            rate = low_rate * (1.0 + 0.05 * normal(rng));
        }
        if (keep(t) && t < stay.los_hours) urine.push_back({t, rate * stay.weight_kg});
    }

    // Notes inside the first two days; the first one always inside 24h.
    const int n_notes = 2 + static_cast<int>(uniform(rng, 0.0, 3.0));
    std::vector<double> offsets;
    offsets.push_back(uniform(rng, 0.5, 20.0));
    for (int i = 1; i < n_notes; ++i) offsets.push_back(uniform(rng, 0.5, 47.5));
    std::sort(offsets.begin(), offsets.end());
    const std::size_t generic_count = std::min<std::size_t>(vocab.size(), vocab.size() - 24);
    for (double off : offsets) {
        if (off >= stay.los_hours) continue;
        ClinicalNote note;
        note.offset_hours = off;
        const int len = 6 + static_cast<int>(uniform(rng, 0.0, 7.0));
        for (int k = 0; k < len; ++k) {
            const double r = uniform(rng, 0.0, 1.0);
            if (plan.is_case && r < config.note_signal * note_strength) {
                const auto& words = kSignalWords[static_cast<std::size_t>(plan.subtype - 1)];
                note.tokens.emplace_back(words[static_cast<std::size_t>(uniform(rng, 0.0, 8.0)) % 8]);
            } else if (!plan.is_case && r < kControlSignalRate) {
                const auto& words = kSignalWords[static_cast<std::size_t>(uniform(rng, 0.0, 3.0)) % 3];
                note.tokens.emplace_back(words[static_cast<std::size_t>(uniform(rng, 0.0, 8.0)) % 8]);
            } else if (bernoulli(rng, kStopWordRate)) {
                note.tokens.emplace_back(kStopWords[static_cast<std::size_t>(uniform(rng, 0.0, 8.0)) % 8]);
            } else {
                // generic words and fillers sit outside the 24 signal slots
                std::size_t idx = static_cast<std::size_t>(uniform(rng, 0.0, double(generic_count)));
                idx = std::min(idx, generic_count - 1);
                if (idx >= kGenericWords.size()) idx += 24;
                note.tokens.push_back(vocab[idx]);
            }
        }
        stay.notes.push_back(std::move(note));
    }
    return stay;
}

}  // namespace

int planted_stage_for_subtype(int subtype) {
    switch (subtype) {
        case 1: return 1;
        case 2: return 3;
        case 3: return 2;
        default: throw ArgumentError("subtype must be 1, 2 or 3");
    }
}

std::vector<std::string> synthetic_vocabulary(std::size_t vocab_size) {
    const std::size_t base = kGenericWords.size() + 3 * kSignalWords[0].size();
    if (vocab_size < base) {
        throw ConfigError("vocab_size must be at least " + std::to_string(base));
    }
    std::vector<std::string> words;
    words.reserve(vocab_size);
    for (auto w : kGenericWords) words.emplace_back(w);
    for (const auto& group : kSignalWords)
        for (auto w : group) words.emplace_back(w);
    for (std::size_t i = 0; words.size() < vocab_size; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "term%03zu", i);
        words.emplace_back(buf);
    }
    return words;
}

void validate(const CohortConfig& config) {
    if (config.n_stays == 0) throw ConfigError("n_stays must be positive");
    if (!(config.case_fraction > 0.0 && config.case_fraction < 1.0)) {
        throw ConfigError("case_fraction must lie in (0, 1)");
    }
    double total = 0.0;
    for (double w : config.subtype_mixture) {
        if (!(w >= 0.0)) throw ConfigError("subtype_mixture weights must be non-negative");
        total += w;
    }
    if (total <= 0.0) throw ConfigError("subtype_mixture is degenerate (all weights zero)");
    if (std::abs(total - 1.0) > 1e-6) throw ConfigError("subtype_mixture must sum to 1");
    if (!(config.noise_scale >= 0.0)) throw ConfigError("noise_scale must be non-negative");
    if (!(config.complementarity >= 0.0 && config.complementarity <= 1.0)) {
        throw ConfigError("complementarity must lie in [0, 1]");
    }
    if (!(config.note_signal >= 0.0 && config.note_signal <= 1.0)) {
        throw ConfigError("note_signal must lie in [0, 1]");
    }
    if (!(config.missing_rate >= 0.0 && config.missing_rate < 1.0)) {
        throw ConfigError("missing_rate must lie in [0, 1)");
    }
    synthetic_vocabulary(config.vocab_size);
}

std::vector<IcuStay> generate_cohort(const CohortConfig& config) {
    validate(config);
    const auto vocab = synthetic_vocabulary(config.vocab_size);
    Rng master(splitmix64(config.seed));
    std::vector<StayPlan> plans(config.n_stays);
    std::size_t patients = 0;
    bool previous_shared = true;
    for (std::size_t i = 0; i < config.n_stays; ++i) {
        StayPlan& p = plans[i];
        p.is_case = bernoulli(master, config.case_fraction);
        p.subtype = p.is_case ? static_cast<int>(categorical(master, config.subtype_mixture)) + 1 : 0;
        const bool repeat = i > 0 && !previous_shared && bernoulli(master, kRepeatPatientRate);
        const auto g = static_cast<std::size_t>(p.subtype);
        if (repeat) {
            const StayPlan& prev = plans[i - 1];
            p.patient_id = prev.patient_id;
            p.sex = prev.sex;
            p.ethnicity = prev.ethnicity;
            p.age = std::min(95.0, prev.age + uniform(master, 0.0, 2.0));
            previous_shared = true;
        } else {
            p.patient_id = make_id('P', ++patients);
            p.age = std::clamp(kAgeMean[g] + kAgeSd[g] * normal(master), 18.0, 95.0);
            p.sex = bernoulli(master, kMaleRate[g]) ? Sex::male : Sex::female;
            p.ethnicity = static_cast<Ethnicity>(categorical(master, kEthnicityRates[g]));
            previous_shared = false;
        }
        p.seed = splitmix64(config.seed ^ (0x5bd1e995ULL * (i + 1)));
    }
    std::vector<IcuStay> stays;
    stays.reserve(plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        stays.push_back(generate_stay(config, plans[i], i, vocab));
    }
    return stays;
}

}  // namespace akisub::cohort
