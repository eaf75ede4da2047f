#pragma once

#include <cstddef>
#include <vector>

#include "akisub/model/memnet.hpp"

namespace akisub::baselines {

using model::HyperConfig;
using model::StayInput;

enum class SequenceKind { lstm, hielstm };

/// LSTM: one LSTM (hidden emb_dim) over the t x d rows, last state
/// concatenated with the static vector, linear head with bias.
/// HieLSTM-only: note encoder of the memory-network model, linear head with bias.
struct SequenceModel {
    SequenceKind kind = SequenceKind::lstm;
    HyperConfig hyper;
    std::size_t vocab_size = 0;
    std::size_t n_vars = 0;
    numeric::ParameterSet params;
};

struct SequenceTraining {
    SequenceModel model;
    std::vector<double> loss_history;
};

SequenceModel init_lstm_baseline(const HyperConfig& hyper, std::size_t n_vars);
SequenceModel init_hielstm_only(const HyperConfig& hyper, std::size_t vocab_size);

/// Class probabilities (P(control), P(case)) for one stay.
numeric::Var sequence_forward(numeric::Tape& tape, const SequenceModel& model, const StayInput& input);
numeric::Var sequence_total_loss(numeric::Tape& tape, const SequenceModel& model,
                                 const std::vector<StayInput>& inputs, const std::vector<int>& labels);

SequenceTraining lstm_baseline_train(const std::vector<StayInput>& inputs, const std::vector<int>& labels,
                                     const HyperConfig& hyper);
SequenceTraining hielstm_only_train(const std::vector<StayInput>& inputs, const std::vector<int>& labels,
                                    const HyperConfig& hyper, std::size_t vocab_size);

std::vector<double> predict_proba(const SequenceModel& model, const std::vector<StayInput>& inputs);

}  // namespace akisub::baselines
