#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace akisub::cohort {

enum class VariableGroup { chart, lab };

/// One time-dependent structured variable. Archetype targets are the
/// per-sub-phenotype first-24h means and standard deviations of the case
/// cohort; `control_*` describe stays that never develop AKI.
struct VariableSpec {
    std::string_view name;
    VariableGroup group;
    std::string_view units;
    double control_mean;
    double control_sd;
    std::array<double, 3> subtype_mean;
    std::array<double, 3> subtype_sd;
    double lower_bound;  // physiological floor used when sampling
};

inline constexpr std::string_view kCreatinine = "Creatinine";
inline constexpr std::string_view kUrine = "Urine";

inline constexpr std::size_t kChartVariableCount = 8;
inline constexpr std::size_t kLabVariableCount = 13;
inline constexpr std::size_t kStructuredVariableCount = kChartVariableCount + kLabVariableCount;

/// Closed vocabulary in fixed order: 8 chart events then 13 lab events.
/// "Urine" is stored as output volume (mL/h) and becomes a rate (mL/kg/h)
/// once divided by body weight; its targets below are rates.
std::span<const VariableSpec> structured_variables();
std::optional<std::size_t> variable_index(std::string_view name);
const VariableSpec& variable_spec(std::string_view name);

inline constexpr std::array<std::string_view, 4> kMedicationNames = {
    "diuretics", "nsaid", "radiocontrast", "angiotensin"};
inline constexpr std::array<std::string_view, 9> kComorbidityNames = {
    "chf", "peripheral_vascular", "hypertension", "diabetes", "liver_disease",
    "mi", "cad", "cirrhosis", "jaundice"};

}  // namespace akisub::cohort
