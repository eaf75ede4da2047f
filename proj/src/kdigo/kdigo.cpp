#include "akisub/kdigo/kdigo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "akisub/error.hpp"

namespace akisub::kdigo {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

// Earliest in-window time at which some pair (i, j), t_j - t_i <= 48h, rises
// by at least 0.3 and ends at a level >= min_level.
double earliest_delta(const EventSeries& scr, const Window& w, double min_level) {
    const auto& p = scr.points;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!w.contains(p[j].offset_hours) || p[j].value < min_level) continue;
        for (std::size_t i = 0; i < j; ++i) {
            if (p[j].offset_hours - p[i].offset_hours > kDeltaHours) continue;
            if (p[j].value - p[i].value >= kDeltaScr - 1e-12) return p[j].offset_hours;
        }
    }
    return kNever;
}

double earliest_ratio(const EventSeries& scr, const Window& w, double baseline, double ratio) {
    for (const auto& pt : scr.points) {
        if (w.contains(pt.offset_hours) && pt.value >= ratio * baseline - 1e-12) return pt.offset_hours;
    }
    return kNever;
}

// A run qualifies from start + hours until its end. Candidate instants are
// `hours` after each low observation of the run and every urine observation
// in the qualifying stretch.
double earliest_low_rate(const EventSeries& urine, const Window& w, double threshold, double hours) {
    double best = kNever;
    for (const auto& s : low_rate_spans(urine, threshold)) {
        const double from = s.start + hours;
        if (from > s.end) continue;
        for (const auto& p : urine.points) {
            const double t = p.offset_hours;
            if (t >= s.start && t <= s.end && p.value < threshold && t + hours <= s.end && w.contains(t + hours))
                best = std::min(best, t + hours);
            if (t >= from && t <= s.end && w.contains(t)) best = std::min(best, t);
        }
    }
    return best;
}

}  // namespace

std::string_view to_string(Rule rule) {
    switch (rule) {
        case Rule::scr_delta_48h: return "scr_delta_48h";
        case Rule::scr_ratio_7d: return "scr_ratio_7d";
        case Rule::urine_6h: return "urine_6h";
    }
    return "unknown";
}

double egfr_mdrd(double scr, double age, cohort::Sex sex, cohort::Ethnicity ethnicity) {
    if (!(scr > 0.0)) throw ArgumentError("egfr_mdrd: creatinine must be positive");
    if (!(age > 0.0)) throw ArgumentError("egfr_mdrd: age must be positive");
    double egfr = 175.0 * std::pow(scr, -1.154) * std::pow(age, -0.203);
    if (sex == cohort::Sex::female) egfr *= 0.742;
    if (ethnicity == cohort::Ethnicity::black) egfr *= 1.212;
    return egfr;
}

std::optional<BaselineScr> baseline_scr(const EventSeries& scr, double window_start,
                                        double lookback_hours) {
    if (scr.points.empty()) return std::nullopt;
    const double from = window_start - lookback_hours;
    std::optional<BaselineScr> best;
    for (const auto& p : scr.points) {
        if (p.offset_hours >= from && p.offset_hours < window_start) {
            if (!best || p.value < best->value) best = BaselineScr{p.value, from, window_start};
        }
    }
    if (best) return best;
    for (const auto& p : scr.points) {
        if (p.offset_hours >= window_start) return BaselineScr{p.value, p.offset_hours, p.offset_hours};
    }
    // every measurement predates the lookback range
    const auto& last = scr.points.back();
    return BaselineScr{last.value, last.offset_hours, last.offset_hours};
}

std::vector<LowRateSpan> low_rate_spans(const EventSeries& urine_rate, double threshold) {
    std::vector<LowRateSpan> spans;
    const auto& p = urine_rate.points;
    std::size_t i = 0;
    while (i < p.size()) {
        if (p[i].value >= threshold) {
            ++i;
            continue;
        }
        std::size_t k = i;
        while (k + 1 < p.size() && p[k + 1].value < threshold) ++k;
        const double end = k + 1 < p.size() ? p[k + 1].offset_hours : p[k].offset_hours;
        spans.push_back({p[i].offset_hours, end});
        i = k + 1;
    }
    return spans;
}

AkiLabel detect_aki(const EventSeries& scr, const EventSeries& urine_rate,
                    const std::optional<BaselineScr>& baseline, const Window& window) {
    if (scr.points.empty() && urine_rate.points.empty()) {
        throw InsufficientDataError("detect_aki: no creatinine and no urine observations");
    }
    struct Candidate {
        double time;
        Rule rule;
    };
    Candidate c[3] = {
        {earliest_delta(scr, window, -kNever), Rule::scr_delta_48h},
        {baseline ? earliest_ratio(scr, window, baseline->value, kRatioCase) : kNever, Rule::scr_ratio_7d},
        {earliest_low_rate(urine_rate, window, kOliguriaRate, 6.0), Rule::urine_6h},
    };
    const Candidate* first = &c[0];
    for (const auto& x : c)
        if (x.time < first->time) first = &x;
    AkiLabel label;
    if (first->time == kNever) return label;
    label.is_case = true;
    label.onset_offset_hours = first->time;
    label.triggering_rule = first->rule;
    return label;
}

int stage_aki(const EventSeries& scr, const EventSeries& urine_rate,
              const std::optional<BaselineScr>& baseline, const Window& window, bool rrt_flag) {
    if (!detect_aki(scr, urine_rate, baseline, window).is_case) {
        throw ContractError("stage_aki called on a window without AKI");
    }
    int stage = 1;
    if (baseline) {
        if (earliest_ratio(scr, window, baseline->value, 2.0) != kNever) stage = std::max(stage, 2);
        if (earliest_ratio(scr, window, baseline->value, 3.0) != kNever) stage = 3;
    }
    if (earliest_delta(scr, window, kStage3Scr) != kNever) stage = 3;
    if (earliest_low_rate(urine_rate, window, kOliguriaRate, 12.0) != kNever) stage = std::max(stage, 2);
    if (earliest_low_rate(urine_rate, window, kSevereOliguriaRate, 24.0) != kNever) stage = 3;
    if (earliest_low_rate(urine_rate, window, kAnuriaRate, 12.0) != kNever) stage = 3;
    if (rrt_flag) stage = 3;
    return stage;
}

ExclusionResult apply_exclusions(const std::vector<IcuStay>& stays, double t1_hours, double t2_days) {
    if (!(t1_hours > 0.0) || !(t2_days > 0.0)) {
        throw ArgumentError("apply_exclusions: t1 and t2 must be positive");
    }
    ExclusionResult result;
    // offsets are >= 0, so (-1, t1] covers the closed observation window
    const Window observation{-1.0, t1_hours};
    const Window prediction{t1_hours, t1_hours + 24.0 * t2_days};
    for (const auto& stay : stays) {
        EventSeries scr = cohort::creatinine_series(stay);
        EventSeries urine;
        try {
            urine = cohort::urine_rate_series(stay);
        } catch (const DataError&) {
            result.log.push_back({stay.stay_id, std::string(kReasonInvalidRecord)});
            continue;
        }
        auto in_prediction = [&](const EventSeries& s) {
            return std::any_of(s.points.begin(), s.points.end(),
                               [&](const auto& p) { return prediction.contains(p.offset_hours); });
        };
        if (!scr.points.empty() || !urine.points.empty()) {
            auto obs_label = detect_aki(scr, urine, baseline_scr(scr, observation.start), observation);
            if (obs_label.is_case) {
                result.log.push_back({stay.stay_id, std::string(kReasonAkiObservation)});
                continue;
            }
        }
        if (!in_prediction(scr) && !in_prediction(urine)) {
            result.log.push_back({stay.stay_id, std::string(kReasonNoPredictionData)});
            continue;
        }
        LabeledStay labeled{stay, {}, baseline_scr(scr, prediction.start)};
        labeled.label = detect_aki(scr, urine, labeled.baseline, prediction);
        if (labeled.label.is_case) {
            labeled.label.stage = stage_aki(scr, urine, labeled.baseline, prediction, stay.rrt_flag);
        }
        result.kept.push_back(std::move(labeled));
    }
    return result;
}

void write_exclusion_log(const std::vector<ExclusionEntry>& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "stay_id,reason\n";
    for (const auto& e : log) out << e.stay_id << ',' << e.reason << '\n';
    if (!out) throw IoError("failed writing exclusion log");
}

}  // namespace akisub::kdigo
