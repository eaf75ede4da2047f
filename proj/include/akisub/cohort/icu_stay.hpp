#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace akisub::cohort {

enum class Sex { male, female };
enum class Ethnicity { white, black, asian, other };

std::string to_string(Sex sex);
std::string to_string(Ethnicity ethnicity);
Sex parse_sex(const std::string& text);
Ethnicity parse_ethnicity(const std::string& text);

struct EventPoint {
    double offset_hours = 0.0;
    double value = 0.0;

    friend bool operator==(const EventPoint&, const EventPoint&) = default;
};

/// Time-ordered observations of one variable; offsets strictly increase.
struct EventSeries {
    std::string variable;
    std::vector<EventPoint> points;

    friend bool operator==(const EventSeries&, const EventSeries&) = default;
};

struct ClinicalNote {
    double offset_hours = 0.0;
    std::vector<std::string> tokens;  // lowercase, non-empty

    friend bool operator==(const ClinicalNote&, const ClinicalNote&) = default;
};

struct IcuStay {
    std::string stay_id;
    std::string patient_id;
    double age = 0.0;
    Sex sex = Sex::male;
    Ethnicity ethnicity = Ethnicity::white;
    double weight_kg = 0.0;
    double los_hours = 0.0;  // events lie in [0, los_hours)
    std::array<bool, 4> med_flags{};
    std::array<bool, 9> comorbidity_flags{};
    bool rrt_flag = false;
    std::map<std::string, EventSeries> chart_series;
    std::map<std::string, EventSeries> lab_series;
    std::vector<ClinicalNote> notes;
    // generator ground truth; never read by models
    std::optional<int> planted_subtype;
    std::optional<int> planted_stage;

    friend bool operator==(const IcuStay&, const IcuStay&) = default;

    /// Series for a chart or lab variable, or nullptr when never measured.
    const EventSeries* series(const std::string& variable) const;
};

/// Throws DataError on any violated stay invariant.
void validate(const IcuStay& stay);

/// Urine output (mL/h) divided by body weight. Requires weight_kg > 0.
EventSeries urine_rate_series(const IcuStay& stay);
EventSeries creatinine_series(const IcuStay& stay);

}  // namespace akisub::cohort
