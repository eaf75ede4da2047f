#include "akisub/model/hielstm.hpp"

#include "akisub/error.hpp"
#include "akisub/numeric/ops.hpp"

namespace akisub::model {

namespace {

Tensor lstm_weights(std::size_t input, std::size_t hidden, Rng& rng, double init) {
    return numeric::uniform_tensor({4 * hidden, input + hidden}, -init, init, rng);
}

Tensor lstm_bias(std::size_t hidden, Rng& rng, double init) {
    Tensor b = numeric::uniform_tensor({4 * hidden}, -init, init, rng);
    for (std::size_t k = hidden; k < 2 * hidden; ++k) b[k] = 1.0;
    return b;
}

std::size_t effective_length(const std::vector<int>& seq) {
    std::size_t n = seq.size();
    while (n > 1 && seq[n - 1] == 0) --n;
    return n;
}

}  // namespace

void add_hielstm_params(ParameterSet& params, const HieLstmDims& dims, Rng& rng, const std::string& prefix,
                        double init) {
    if (dims.vocab_size == 0 || dims.word_dim == 0 || dims.bottom_hidden == 0 || dims.top_hidden == 0) {
        throw ConfigError("HieLSTM dimensions must be positive");
    }
    params.add(prefix + "word_emb", numeric::uniform_tensor({dims.vocab_size, dims.word_dim}, -init, init, rng));
    params.add(prefix + "bottom_W", lstm_weights(dims.word_dim, dims.bottom_hidden, rng, init));
    params.add(prefix + "bottom_b", lstm_bias(dims.bottom_hidden, rng, init));
    params.add(prefix + "top_W", lstm_weights(dims.bottom_hidden, dims.top_hidden, rng, init));
    params.add(prefix + "top_b", lstm_bias(dims.top_hidden, rng, init));
}

Var run_lstm(Tape& tape, const std::vector<Var>& inputs, Var W, Var b, std::size_t hidden) {
    if (inputs.empty()) throw ArgumentError("run_lstm: empty input sequence");
    Var h = tape.constant(Tensor({hidden}));
    Var c = tape.constant(Tensor({hidden}));
    for (const Var& x : inputs) {
        auto s = numeric::lstm_cell(x, h, c, W, b);
        h = s.h;
        c = s.c;
    }
    return h;
}

Var encode_notes(Tape& tape, const ParameterSet& params, const NoteSequences& notes, const std::string& prefix) {
    if (notes.empty()) throw ArgumentError("encode_notes: at least one note sequence required");
    Var emb = tape.parameter(params, prefix + "word_emb");
    Var bW = tape.parameter(params, prefix + "bottom_W");
    Var bb = tape.parameter(params, prefix + "bottom_b");
    Var tW = tape.parameter(params, prefix + "top_W");
    Var tb = tape.parameter(params, prefix + "top_b");
    const std::size_t bottom_hidden = bb.value().size() / 4;
    const std::size_t top_hidden = tb.value().size() / 4;
    const std::size_t vocab = emb.value().rows();
    std::vector<Var> note_states;
    note_states.reserve(notes.size());
    for (const auto& seq : notes) {
        if (seq.empty()) throw ArgumentError("encode_notes: empty note sequence");
        std::vector<Var> words;
        const std::size_t len = effective_length(seq);
        for (std::size_t k = 0; k < len; ++k) {
            if (seq[k] < 0 || static_cast<std::size_t>(seq[k]) >= vocab) {
                throw DimensionError("token index " + std::to_string(seq[k]) + " outside vocabulary of " +
                                     std::to_string(vocab));
            }
            words.push_back(numeric::row(emb, static_cast<std::size_t>(seq[k])));
        }
        note_states.push_back(run_lstm(tape, words, bW, bb, bottom_hidden));
    }
    return run_lstm(tape, note_states, tW, tb, top_hidden);
}

Tensor encode_notes(const NoteSequences& notes, const ParameterSet& params, const std::string& prefix) {
    Tape tape;
    return encode_notes(tape, params, notes, prefix).value();
}

}  // namespace akisub::model
