#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "akisub/pipeline/metrics.hpp"

namespace akisub::pipeline {

/// Fold id in [0, n_folds) per sample. Samples sharing a group id share a
/// fold; groups are placed greedily (largest first, seeded tie order) to
/// balance case and total counts. Throws FoldError when there are fewer
/// case-bearing or case-free groups than folds.
std::vector<int> stratified_group_folds(const std::vector<int>& labels, const std::vector<std::string>& groups,
                                        std::size_t n_folds, std::uint64_t seed);

/// One tunable setting of a model.
struct Candidate {
    double lr_multiplier = 1.0;
    std::size_t hops = 1;
};

/// Trains on `train` with `candidate` and returns P(case) for `test`. All
/// fitted statistics must come from `train`; `split_id` names that split.
using FitPredict = std::function<std::vector<double>(const std::vector<std::size_t>& train,
                                                     const std::vector<std::size_t>& test,
                                                     const Candidate& candidate, const std::string& split_id)>;

struct CvModel {
    std::string id;
    std::vector<Candidate> grid;  // a single entry skips inner tuning
    FitPredict fit_predict;
};

struct CvOptions {
    std::size_t outer_folds = 5;
    std::size_t inner_folds = 5;
    std::uint64_t seed = 1;
    /// Outer folds run as independent jobs, at most this many at once.
    /// Results are collected in fold order regardless.
    std::size_t jobs = 1;
};

struct CvResult {
    std::vector<MetricRecord> records;
    std::vector<MetricSummary> summary;
    std::vector<std::string> chosen;  // "<model> fold <f>: lr x<m>, L=<h>"
};

/// fit_predict must be safe to call concurrently when jobs > 1.
/// Outer folds split the data; inner folds on each outer training split pick
/// the candidate with the best mean AUC (first wins ties).
CvResult nested_cv(const std::vector<int>& labels, const std::vector<std::string>& groups,
                   const std::vector<CvModel>& models, const CvOptions& options);

}  // namespace akisub::pipeline
