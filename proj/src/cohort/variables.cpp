#include "akisub/cohort/variables.hpp"

#include <string>

#include "akisub/error.hpp"

namespace akisub::cohort {

namespace {

using G = VariableGroup;

// Case archetype targets (sub-phenotype I, II, III) follow the reported
// first-24h summaries. Controls share sub-phenotype I physiology except for
// the kidney and blood-count markers that separate cases from controls.
constexpr std::array<VariableSpec, kStructuredVariableCount> kVariables = {{
    {"DiasBP", G::chart, "mmHg", 58.0, 12.24, {58.64, 61.13, 60.45}, {12.24, 12.53, 12.62}, 20.0},
    {"Glucose", G::chart, "mg/dL", 126.0, 40.66, {134.32, 145.56, 144.22}, {40.66, 46.67, 46.67}, 40.0},
    {"HeartRate", G::chart, "bpm", 85.0, 17.09, {87.22, 90.65, 86.12}, {17.09, 16.26, 15.09}, 30.0},
    {"MeanBP", G::chart, "mmHg", 77.0, 13.25, {76.09, 78.46, 79.02}, {13.25, 13.67, 11.40}, 30.0},
    {"RespRate", G::chart, "/min", 17.5, 4.44, {18.08, 20.26, 19.19}, {4.44, 4.75, 4.01}, 4.0},
    {"SpO2", G::chart, "%", 97.0, 1.97, {96.37, 96.27, 97.23}, {1.97, 2.16, 2.13}, 70.0},
    {"SysBP", G::chart, "mmHg", 118.0, 15.94, {115.67, 120.22, 120.43}, {15.94, 18.11, 17.63}, 50.0},
    {"Temp", G::chart, "C", 36.85, 0.62, {36.85, 36.82, 36.82}, {0.62, 0.66, 0.62}, 33.0},
    {"Bicarbonate", G::lab, "mEq/L", 24.5, 4.16, {23.87, 24.70, 24.51}, {4.16, 4.83, 4.60}, 5.0},
    {"BUN", G::lab, "mg/dL", 18.0, 22.74, {28.66, 28.65, 27.66}, {22.74, 24.77, 21.34}, 2.0},
    {"Calcium", G::lab, "mg/dL", 8.5, 0.73, {8.36, 8.40, 8.78}, {0.73, 0.74, 0.70}, 4.0},
    {"Chloride", G::lab, "mEq/L", 104.0, 5.45, {105.19, 102.22, 103.38}, {5.45, 5.90, 5.62}, 70.0},
    {"Creatinine", G::lab, "mg/dL", 0.95, 0.34, {1.55, 1.96, 1.69}, {0.34, 0.49, 0.32}, 0.3},
    {"Hemoglobin", G::lab, "g/dL", 12.8, 1.76, {13.55, 17.18, 15.53}, {1.76, 1.55, 1.91}, 5.0},
    {"INR", G::lab, "", 1.4, 0.72, {1.47, 1.54, 1.47}, {0.72, 1.04, 0.94}, 0.8},
    {"Platelet", G::lab, "K/uL", 230.0, 43.63, {242.08, 384.96, 265.31}, {43.63, 115.46, 44.64}, 20.0},
    {"Potassium", G::lab, "mEq/L", 4.2, 0.56, {4.24, 4.25, 4.22}, {0.56, 0.56, 0.54}, 2.0},
    {"PT", G::lab, "s", 15.0, 5.76, {15.45, 17.30, 15.55}, {5.76, 7.45, 6.38}, 9.0},
    {"PTT", G::lab, "s", 34.0, 18.55, {35.12, 39.24, 36.94}, {18.55, 14.42, 17.18}, 15.0},
    {"WBC", G::lab, "K/uL", 9.0, 8.72, {10.59, 15.71, 13.23}, {8.72, 7.97, 5.14}, 0.5},
    {"Urine", G::lab, "mL/h", 1.55, 0.24, {1.35, 1.02, 1.19}, {0.24, 0.25, 0.25}, 0.55},
}};

}  // namespace

std::span<const VariableSpec> structured_variables() { return kVariables; }

std::optional<std::size_t> variable_index(std::string_view name) {
    for (std::size_t i = 0; i < kVariables.size(); ++i) {
        if (kVariables[i].name == name) return i;
    }
    return std::nullopt;
}

const VariableSpec& variable_spec(std::string_view name) {
    auto idx = variable_index(name);
    if (!idx) throw SchemaError("unknown structured variable '" + std::string(name) + "'");
    return kVariables[*idx];
}

}  // namespace akisub::cohort
