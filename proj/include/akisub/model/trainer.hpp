#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "akisub/numeric/tape.hpp"

namespace akisub::model {

struct TrainOptions {
    std::size_t batch_size = 32;
    double learning_rate = 0.01;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
};

/// Builds the loss of sample `i` on `tape`.
using LossBuilder = std::function<numeric::Var(numeric::Tape& tape, std::size_t i)>;

/// Mini-batch Adam on the summed per-sample loss. Samples are reshuffled each
/// epoch from `seed`. Returns the mean per-sample loss of every epoch.
std::vector<double> train_minibatch(numeric::ParameterSet& params, std::size_t n_samples,
                                    const TrainOptions& options, const LossBuilder& loss);

/// Throws TrainingError unless labels are binary and both classes occur.
void require_both_classes(const std::vector<int>& labels);

}  // namespace akisub::model
