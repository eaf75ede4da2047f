#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "akisub/cohort/icu_stay.hpp"

namespace akisub::kdigo {

using cohort::EventSeries;
using cohort::IcuStay;

enum class Rule { scr_delta_48h, scr_ratio_7d, urine_6h };
std::string_view to_string(Rule rule);

/// Half-open interval (start, end] in hours since admission.
struct Window {
    double start = 0.0;
    double end = 0.0;
    bool contains(double t) const { return t > start && t <= end; }
};

struct BaselineScr {
    double value = 0.0;
    double source_start = 0.0;
    double source_end = 0.0;
};

struct AkiLabel {
    bool is_case = false;
    std::optional<double> onset_offset_hours;
    std::optional<int> stage;
    std::optional<Rule> triggering_rule;
};

inline constexpr double kDeltaScr = 0.3;
inline constexpr double kDeltaHours = 48.0;
inline constexpr double kRatioCase = 1.5;
inline constexpr double kLookbackHours = 168.0;
inline constexpr double kOliguriaRate = 0.5;
inline constexpr double kSevereOliguriaRate = 0.3;
inline constexpr double kAnuriaRate = 0.01;
inline constexpr double kStage3Scr = 4.0;

/// MDRD 4-variable equation with the 175 coefficient.
double egfr_mdrd(double scr, double age, cohort::Sex sex, cohort::Ethnicity ethnicity);

/// Minimum SCr over [window_start - lookback, window_start); when that range is
/// empty, the earliest measurement at or after window_start. Returns nullopt
/// when the series is empty.
std::optional<BaselineScr> baseline_scr(const EventSeries& scr, double window_start,
                                        double lookback_hours = kLookbackHours);

/// Maximal run of consecutive urine observations below a threshold, treated as
/// piecewise constant. The run ends at the next observation, or at its own last
/// observation when nothing follows.
struct LowRateSpan {
    double start = 0.0;
    double end = 0.0;
};
std::vector<LowRateSpan> low_rate_spans(const EventSeries& urine_rate, double threshold);

/// Onset is the earliest time inside the window at which any clause holds.
/// SCr clauses are checked at SCr observations. A urine clause holds from run
/// start + duration to run end; it is checked `duration` after each low
/// observation of the run and at every urine observation in that stretch.
/// Throws InsufficientDataError when both series are empty.
AkiLabel detect_aki(const EventSeries& scr, const EventSeries& urine_rate,
                    const std::optional<BaselineScr>& baseline, const Window& window);

/// Maximum stage over every clause holding inside the window. Throws
/// ContractError when detect_aki would label the window a control.
int stage_aki(const EventSeries& scr, const EventSeries& urine_rate,
              const std::optional<BaselineScr>& baseline, const Window& window, bool rrt_flag);

struct LabeledStay {
    IcuStay stay;
    AkiLabel label;
    std::optional<BaselineScr> baseline;
};

struct ExclusionEntry {
    std::string stay_id;
    std::string reason;
};

struct ExclusionResult {
    std::vector<LabeledStay> kept;
    std::vector<ExclusionEntry> log;
};

inline constexpr std::string_view kReasonAkiObservation = "aki_in_observation_window";
inline constexpr std::string_view kReasonNoPredictionData = "no_prediction_window_data";
inline constexpr std::string_view kReasonInvalidRecord = "invalid_record";

/// Removes stays with AKI in [0, t1] or without SCr/urine data in
/// (t1, t1 + 24 t2_days] and labels the rest over that prediction window.
ExclusionResult apply_exclusions(const std::vector<IcuStay>& stays, double t1_hours,
                                 double t2_days = 7.0);

void write_exclusion_log(const std::vector<ExclusionEntry>& log, const std::filesystem::path& path);

}  // namespace akisub::kdigo
