#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "akisub/numeric/tape.hpp"
#include "akisub/numeric/tensor.hpp"

namespace akisub::model {

using numeric::ParameterSet;
using numeric::Rng;
using numeric::Tape;
using numeric::Tensor;
using numeric::Var;

/// Word sequences of one stay, one entry per note in timestamp order.
using NoteSequences = std::vector<std::vector<int>>;

struct HieLstmDims {
    std::size_t vocab_size = 0;
    std::size_t word_dim = 100;
    std::size_t bottom_hidden = 200;
    std::size_t top_hidden = 128;
};

/// Registers "<prefix>word_emb" (V x word_dim), "<prefix>bottom_W",
/// "<prefix>bottom_b", "<prefix>top_W", "<prefix>top_b". Weights are drawn
/// from U[-init, init]; forget-gate biases start at 1.
void add_hielstm_params(ParameterSet& params, const HieLstmDims& dims, Rng& rng,
                        const std::string& prefix = "", double init = 0.1);

/// Runs an LSTM with weights (W, b) over `inputs`; returns the last hidden state.
Var run_lstm(Tape& tape, const std::vector<Var>& inputs, Var W, Var b, std::size_t hidden);

/// Bottom LSTM over each note's words (trailing pads ignored, at least one
/// step), top LSTM over the per-note states. Returns the top state at the
/// last note.
Var encode_notes(Tape& tape, const ParameterSet& params, const NoteSequences& notes,
                 const std::string& prefix = "");
Tensor encode_notes(const NoteSequences& notes, const ParameterSet& params, const std::string& prefix = "");

}  // namespace akisub::model
