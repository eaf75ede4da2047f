#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "akisub/cohort/icu_stay.hpp"
#include "akisub/features/vocabulary.hpp"
#include "akisub/numeric/tensor.hpp"

namespace akisub::features {

using cohort::IcuStay;
using numeric::Tensor;

inline constexpr double kBinHours = 2.0;

/// t x d matrix of 2-hour bin means over the 21 structured variables (urine as
/// mL/kg/h). mask(j, v) is 1 where the bin held at least one observation.
struct StayTensor {
    Tensor values;
    std::vector<std::uint8_t> mask;
    bool scaled = false;

    std::size_t t() const { return values.rows(); }
    std::size_t d() const { return values.cols(); }
    bool observed(std::size_t j, std::size_t v) const { return mask[j * d() + v] != 0; }

    friend bool operator==(const StayTensor&, const StayTensor&) = default;
};

/// Observations with offsets in [0, t1) are averaged per bin [2j, 2j + 2).
StayTensor bin_events(const IcuStay& stay, double t1_hours);

/// Training-split statistics per variable: mean over observed cells, min/max
/// over observed cells.
struct ScalingStats {
    std::string split_id;
    std::vector<double> mean;
    std::vector<double> min;
    std::vector<double> max;

    friend bool operator==(const ScalingStats&, const ScalingStats&) = default;
};

/// Throws ImputationError naming a variable with no training observation.
ScalingStats fit_scaling(const std::vector<StayTensor>& training, const std::string& split_id);

/// Mean-imputes masked cells, min-max scales and clips to [0, 1]. A
/// degenerate range (min == max) maps to 0. Already-scaled input is returned
/// unchanged.
StayTensor apply_scaling(const StayTensor& tensor, const ScalingStats& stats);

struct ScaledSplit {
    std::vector<StayTensor> tensors;
    ScalingStats stats;
};
/// fit_scaling on `training` followed by apply_scaling to each of them.
ScaledSplit impute_and_scale(const std::vector<StayTensor>& training, const std::string& split_id);

/// Throws ContractError when `stats` were not fit on `expected_split`.
void require_split(const ScalingStats& stats, const std::string& expected_split);

/// age/100, sex one-hot (male, female), ethnicity one-hot (white, black,
/// asian, other), 4 medication flags, 9 comorbidity flags.
inline constexpr std::size_t kStaticDim = 20;
std::vector<double> static_vector(const IcuStay& stay);

// Baseline summary vector. Layout: for each of the 19 summary series (the
// structured variables except INR and PT, in catalogue order) the block
// first, last, mean, min, max, slope, count; then 14 static entries: age/100,
// female, black, asian, other, 4 medications, cardiac (chf|mi|cad), vascular
// (peripheral vascular|hypertension), diabetes, hepatic (liver disease|
// cirrhosis|jaundice), comorbidity count / 9.
inline constexpr std::size_t kSummarySeries = 19;
inline constexpr std::size_t kSummaryStats = 7;
inline constexpr std::size_t kSummaryStatic = 14;
inline constexpr std::size_t kBaselineDim = kSummarySeries * kSummaryStats + kSummaryStatic;

struct BaselineFeatures {
    std::vector<double> values;         // kBaselineDim; NaN for statistics of empty series
    std::vector<std::uint8_t> missing;  // kSummarySeries flags
};

/// Statistics over raw observations in [0, t1). Slope is the least-squares
/// slope of observed bin means against bin index (per 2h bin); 0 with fewer
/// than two observed bins.
BaselineFeatures summarize_for_baselines(const IcuStay& stay, double t1_hours);
std::vector<std::string> baseline_feature_names();
std::vector<std::size_t> summary_variable_indices();

/// Training means of each summary entry, used to fill missing statistics.
struct SummaryImputer {
    std::string split_id;
    std::vector<double> mean;
};
SummaryImputer fit_summary_imputer(const std::vector<BaselineFeatures>& training, const std::string& split_id);
std::vector<double> impute_summary(const BaselineFeatures& features, const SummaryImputer& imputer);

/// One index sequence per note with offset < t1, ordered by offset. OOV tokens
/// are dropped, a note left empty becomes a single pad token, sequences are
/// truncated to max_note_len and right-padded to it when max_note_len > 0.
/// A stay without notes yields the single sequence {kNull}.
std::vector<std::vector<int>> notes_to_sequences(const IcuStay& stay, const Vocabulary& vocab,
                                                 std::size_t max_note_len = 0,
                                                 double t1_hours = std::numeric_limits<double>::infinity());

/// In-vocabulary token counts over notes with offset < t1.
std::vector<double> notes_to_bow(const IcuStay& stay, const Vocabulary& vocab,
                                 double t1_hours = std::numeric_limits<double>::infinity());

/// Token lists of the notes with offset < t1, ordered by offset.
using NoteTokens = std::vector<std::vector<std::string>>;
NoteTokens note_tokens(const IcuStay& stay, double t1_hours = std::numeric_limits<double>::infinity());
std::vector<std::vector<int>> tokens_to_sequences(const NoteTokens& notes, const Vocabulary& vocab,
                                                  std::size_t max_note_len = 0);
std::vector<double> tokens_to_bow(const NoteTokens& notes, const Vocabulary& vocab);

}  // namespace akisub::features
