#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "akisub/cohort/icu_stay.hpp"
#include "akisub/stats/tests.hpp"

namespace akisub::stats {

enum class RowKind { continuous, discrete };

struct ReportRow {
    std::string variable;
    RowKind kind = RowKind::continuous;
    std::vector<std::string> cells;     // per cluster: "mean (sd)" or "count (pct%)"
    std::vector<double> cluster_means;  // per-cluster mean, or share for binary rows
    std::string test;                   // "anova", "kruskal_wallis", "chi_square" or ""
    std::optional<double> p_unadjusted;
    std::optional<double> p_adjusted;
    std::vector<PairwiseResult> pairwise;
    std::size_t n_used = 0;
};

struct SubtypeReport {
    std::size_t k = 0;
    std::vector<std::size_t> cluster_sizes;
    std::vector<ReportRow> rows;
};

/// Row names in report order: age, sex, ethnicity, 4 medications, 9
/// comorbidities, the 21 structured variables, eGFR.
std::vector<std::string> report_variable_names();

/// Continuous rows use each stay's mean over [0, window_hours) (urine as
/// mL/kg/h, eGFR from the mean creatinine). Unadjusted p follows the
/// normality route of the pooled values; the adjusted p comes from ANCOVA on
/// age (absent for the age row). Discrete blocks are tested by chi-square on
/// the cluster x level table; with more than two levels the adjusted p is the
/// Bonferroni-corrected minimum over per-level indicators. p columns are
/// absent when k < 2. Throws ArgumentError on an empty cluster.
SubtypeReport build_subtype_report(const std::vector<cohort::IcuStay>& stays, const std::vector<int>& clusters,
                                   double window_hours = 24.0);

struct StageComposition {
    std::vector<std::array<std::size_t, 3>> counts;  // k x stage 1..3
    std::vector<std::array<double, 3>> percent;
    std::vector<int> modal_stage;  // 1-based
    std::vector<double> modal_share;
};

/// Throws DataError when a stage is outside {1, 2, 3}.
StageComposition stage_composition(const std::vector<int>& clusters, const std::vector<int>& stages,
                                   std::size_t k);

void write_report_csv(const SubtypeReport& report, const std::filesystem::path& path);
void write_report_table(const SubtypeReport& report, const std::filesystem::path& path);
/// Per-cluster z-scored means of significant continuous rows.
void write_heatmap_csv(const SubtypeReport& report, const std::filesystem::path& path);
void write_stage_composition_csv(const StageComposition& comp, const std::filesystem::path& path);

}  // namespace akisub::stats
