#pragma once

#include <vector>

#include "akisub/pipeline/config.hpp"
#include "akisub/pipeline/cross_validation.hpp"
#include "akisub/pipeline/dataset.hpp"

namespace akisub::pipeline {

/// Cross-validation wrappers for the models listed in config.evaluate.models.
/// Scaling, vocabulary and imputation are refit on each training split. The
/// memory network is tuned over lr multipliers x hop counts, the sequence
/// baselines over lr multipliers only, and logistic regression is untuned.
/// `data` must outlive the returned models.
std::vector<CvModel> make_cv_models(const Dataset& data, const RunConfig& config);

}  // namespace akisub::pipeline
