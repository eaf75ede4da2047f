#include "akisub/cohort/icu_stay.hpp"

#include <cmath>

#include "akisub/cohort/variables.hpp"
#include "akisub/error.hpp"

namespace akisub::cohort {

std::string to_string(Sex sex) { return sex == Sex::male ? "male" : "female"; }

std::string to_string(Ethnicity ethnicity) {
    switch (ethnicity) {
        case Ethnicity::white: return "white";
        case Ethnicity::black: return "black";
        case Ethnicity::asian: return "asian";
        case Ethnicity::other: return "other";
    }
    return "other";
}

Sex parse_sex(const std::string& text) {
    if (text == "male") return Sex::male;
    if (text == "female") return Sex::female;
    throw ParseError("unknown sex '" + text + "'");
}

Ethnicity parse_ethnicity(const std::string& text) {
    if (text == "white") return Ethnicity::white;
    if (text == "black") return Ethnicity::black;
    if (text == "asian") return Ethnicity::asian;
    if (text == "other") return Ethnicity::other;
    throw ParseError("unknown ethnicity '" + text + "'");
}

const EventSeries* IcuStay::series(const std::string& variable) const {
    if (auto it = chart_series.find(variable); it != chart_series.end()) return &it->second;
    if (auto it = lab_series.find(variable); it != lab_series.end()) return &it->second;
    return nullptr;
}

namespace {

void validate_series(const IcuStay& stay, const std::string& key, const EventSeries& s,
                     VariableGroup expected) {
    const auto& spec = variable_spec(s.variable);
    if (spec.group != expected || key != s.variable) {
        throw DataError(stay.stay_id + ": variable '" + s.variable + "' filed under the wrong group");
    }
    double prev = -1.0;
    for (const auto& p : s.points) {
        if (!std::isfinite(p.value) || !std::isfinite(p.offset_hours)) {
            throw DataError(stay.stay_id + ": non-finite observation in " + s.variable);
        }
        if (p.offset_hours < 0.0 || p.offset_hours >= stay.los_hours) {
            throw DataError(stay.stay_id + ": " + s.variable + " observation outside the stay");
        }
        if (p.offset_hours <= prev) {
            throw DataError(stay.stay_id + ": " + s.variable + " offsets not strictly increasing");
        }
        prev = p.offset_hours;
    }
}

}  // namespace

void validate(const IcuStay& stay) {
    if (!(stay.age > 0.0)) throw DataError(stay.stay_id + ": age must be positive");
    if (!(stay.weight_kg > 0.0)) throw DataError(stay.stay_id + ": weight must be positive");
    if (!(stay.los_hours > 0.0)) throw DataError(stay.stay_id + ": length of stay must be positive");
    for (const auto& [k, s] : stay.chart_series) validate_series(stay, k, s, VariableGroup::chart);
    for (const auto& [k, s] : stay.lab_series) validate_series(stay, k, s, VariableGroup::lab);
    for (const auto& n : stay.notes) {
        if (n.tokens.empty()) throw DataError(stay.stay_id + ": empty clinical note");
        if (n.offset_hours < 0.0 || n.offset_hours >= stay.los_hours) {
            throw DataError(stay.stay_id + ": note outside the stay");
        }
    }
    if (stay.planted_subtype && (*stay.planted_subtype < 1 || *stay.planted_subtype > 3)) {
        throw DataError(stay.stay_id + ": planted subtype out of range");
    }
}

EventSeries urine_rate_series(const IcuStay& stay) {
    EventSeries out{std::string(kUrine), {}};
    const EventSeries* s = stay.series(std::string(kUrine));
    if (!s) return out;
    if (!(stay.weight_kg > 0.0)) {
        throw DataError(stay.stay_id + ": urine rate needs a positive body weight");
    }
    out.points.reserve(s->points.size());
    for (const auto& p : s->points) out.points.push_back({p.offset_hours, p.value / stay.weight_kg});
    return out;
}

EventSeries creatinine_series(const IcuStay& stay) {
    const EventSeries* s = stay.series(std::string(kCreatinine));
    if (!s) return EventSeries{std::string(kCreatinine), {}};
    return *s;
}

}  // namespace akisub::cohort
