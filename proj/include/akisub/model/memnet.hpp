#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "akisub/model/hielstm.hpp"
#include "akisub/model/trainer.hpp"

namespace akisub::model {

struct HyperConfig {
    std::size_t memory_size = 12;
    std::size_t emb_dim = 128;
    std::size_t word_dim = 100;
    std::size_t bottom_hidden = 200;
    std::size_t top_hidden = 128;
    std::size_t static_dim = 20;
    std::size_t static_proj = 16;
    std::size_t hops = 1;
    std::size_t batch_size = 32;
    double learning_rate = 0.01;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    double init_scale = 0.1;

    std::size_t repr_dim() const { return emb_dim + static_proj; }
    TrainOptions train_options() const { return {batch_size, learning_rate, epochs, seed}; }

    friend bool operator==(const HyperConfig&, const HyperConfig&) = default;
};

/// Throws ConfigError on a zero size or top_hidden != emb_dim.
void validate(const HyperConfig& hyper);

/// Model input for one stay: the scaled t x d sequence, the 20-entry static
/// vector and its note word sequences.
struct StayInput {
    std::string stay_id;
    Tensor sequence;
    std::vector<double> static_features;
    NoteSequences notes;
};

/// Parameters: HieLSTM (word_emb, bottom_*, top_*), A and B (emb x d), H
/// (emb x emb), Ws (static_proj x static_dim) and w (2 x repr_dim). A and B
/// are single tensors reused at every hop.
struct MemNet {
    HyperConfig hyper;
    std::size_t vocab_size = 0;
    std::size_t n_vars = 0;
    ParameterSet params;
};

MemNet init_memnet(const HyperConfig& hyper, std::size_t vocab_size, std::size_t n_vars);

struct MemoryState {
    Tensor Z;  // t x emb, rows z_j = A s_j
    Tensor E;  // t x emb, rows e_j = B s_j
    std::vector<double> alpha;
    Tensor o;
};

struct MemoryVars {
    Var Z, E, alpha, o;
};

/// Throws DimensionError when the sequence row count differs from memory_size.
MemoryVars memory_read(Tape& tape, Var u, Var sequence, Var A, Var B, std::size_t memory_size);
MemoryState memory_read(const Tensor& u, const Tensor& sequence, const ParameterSet& params,
                        std::size_t memory_size);

struct HopVars {
    Var u;  // u after the final hop
    MemoryVars last;
};
/// u <- H u + o, repeated `hops` times with shared A and B.
HopVars multi_hop(Tape& tape, Var u, Var sequence, const ParameterSet& params, std::size_t hops,
                  std::size_t memory_size);

struct HopResult {
    Tensor u;
    MemoryState last;
};
HopResult multi_hop(const Tensor& u, const Tensor& sequence, const ParameterSet& params, std::size_t hops,
                    std::size_t memory_size);

/// v = concat(u_L + o, Ws * static).
Var fuse(Tape& tape, Var u_L, Var o, Var static_features, const ParameterSet& params);
Tensor fuse(const Tensor& u_L, const Tensor& o, const std::vector<double>& static_features,
            const ParameterSet& params);

/// Two-class softmax of w v; w is 2 x dim(v).
Var predict(Tape& tape, Var v, Var w);
std::array<double, 2> predict(const Tensor& v, const Tensor& w);

struct ForwardVars {
    Var u, u_L, alpha, o, v, prob;  // prob: (P(control), P(case))
};
ForwardVars forward(Tape& tape, const MemNet& model, const StayInput& input);

struct MemNetTraining {
    MemNet model;
    std::vector<double> loss_history;
};

/// Throws TrainingError on an empty or single-class training set.
MemNetTraining train(const std::vector<StayInput>& inputs, const std::vector<int>& labels,
                     const HyperConfig& hyper, std::size_t vocab_size);

/// Summed cross-entropy over the given inputs, for gradient checks.
Var total_loss(Tape& tape, const MemNet& model, const std::vector<StayInput>& inputs,
               const std::vector<int>& labels);

/// n x repr_dim matrix, one row per input in order.
Tensor embed_stays(const MemNet& model, const std::vector<StayInput>& inputs);
/// P(case) per input.
std::vector<double> predict_proba(const MemNet& model, const std::vector<StayInput>& inputs);

}  // namespace akisub::model
