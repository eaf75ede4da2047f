#include "akisub/model/memnet.hpp"

#include "akisub/error.hpp"
#include "akisub/numeric/ops.hpp"

namespace akisub::model {

namespace ops = numeric;

void validate(const HyperConfig& h) {
    if (h.memory_size == 0 || h.emb_dim == 0 || h.word_dim == 0 || h.bottom_hidden == 0 ||
        h.top_hidden == 0 || h.static_dim == 0 || h.static_proj == 0 || h.hops == 0 || h.batch_size == 0) {
        throw ConfigError("hyperparameter sizes must be positive");
    }
    if (h.top_hidden != h.emb_dim) throw ConfigError("top_hidden must equal emb_dim");
    if (!(h.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(h.init_scale >= 0.0)) throw ConfigError("init_scale must be non-negative");
}

MemNet init_memnet(const HyperConfig& hyper, std::size_t vocab_size, std::size_t n_vars) {
    validate(hyper);
    if (n_vars == 0) throw ConfigError("memory input needs at least one variable");
    MemNet m{hyper, vocab_size, n_vars, {}};
    Rng rng(hyper.seed);
    const double a = hyper.init_scale;
    add_hielstm_params(m.params, {vocab_size, hyper.word_dim, hyper.bottom_hidden, hyper.top_hidden}, rng, "", a);
    m.params.add("A", numeric::uniform_tensor({hyper.emb_dim, n_vars}, -a, a, rng));
    m.params.add("B", numeric::uniform_tensor({hyper.emb_dim, n_vars}, -a, a, rng));
    m.params.add("H", numeric::uniform_tensor({hyper.emb_dim, hyper.emb_dim}, -a, a, rng));
    m.params.add("Ws", numeric::uniform_tensor({hyper.static_proj, hyper.static_dim}, -a, a, rng));
    m.params.add("w", numeric::uniform_tensor({2, hyper.repr_dim()}, -a, a, rng));
    return m;
}

MemoryVars memory_read(Tape& tape, Var u, Var sequence, Var A, Var B, std::size_t memory_size) {
    (void)tape;
    if (sequence.value().rank() != 2 || sequence.value().rows() != memory_size) {
        throw DimensionError("stay sequence " + sequence.value().shape_string() + " does not match memory size " +
                             std::to_string(memory_size));
    }
    Var Z = ops::matmul(sequence, ops::transpose(A));
    Var E = ops::matmul(sequence, ops::transpose(B));
    Var alpha = ops::softmax(ops::matvec(Z, u));
    Var o = ops::vecmat(alpha, E);
    return {Z, E, alpha, o};
}

namespace {

MemoryState to_state(const MemoryVars& m) {
    const auto a = m.alpha.value().values();
    return {m.Z.value(), m.E.value(), std::vector<double>(a.begin(), a.end()), m.o.value()};
}

HopVars hops_with(Var u, Var sequence, Var A, Var B, Var H, std::size_t hops,
                  std::size_t memory_size) {
    if (hops == 0) throw ArgumentError("multi_hop needs at least one hop");
    if (sequence.value().rank() != 2 || sequence.value().rows() != memory_size) {
        throw DimensionError("stay sequence " + sequence.value().shape_string() + " does not match memory size " +
                             std::to_string(memory_size));
    }
    // z and e depend only on the tied A, B and the sequence
    Var Z = ops::matmul(sequence, ops::transpose(A));
    Var E = ops::matmul(sequence, ops::transpose(B));
    MemoryVars last{};
    for (std::size_t l = 0; l < hops; ++l) {
        Var alpha = ops::softmax(ops::matvec(Z, u));
        Var o = ops::vecmat(alpha, E);
        last = {Z, E, alpha, o};
        u = ops::add(ops::matvec(H, u), o);
    }
    return {u, last};
}

}  // namespace

MemoryState memory_read(const Tensor& u, const Tensor& sequence, const ParameterSet& params,
                        std::size_t memory_size) {
    Tape tape;
    auto m = memory_read(tape, tape.constant(u), tape.constant(sequence), tape.parameter(params, "A"),
                         tape.parameter(params, "B"), memory_size);
    return to_state(m);
}

HopVars multi_hop(Tape& tape, Var u, Var sequence, const ParameterSet& params, std::size_t hops,
                  std::size_t memory_size) {
    return hops_with(u, sequence, tape.parameter(params, "A"), tape.parameter(params, "B"),
                     tape.parameter(params, "H"), hops, memory_size);
}

HopResult multi_hop(const Tensor& u, const Tensor& sequence, const ParameterSet& params, std::size_t hops,
                    std::size_t memory_size) {
    Tape tape;
    auto r = multi_hop(tape, tape.constant(u), tape.constant(sequence), params, hops, memory_size);
    return {r.u.value(), to_state(r.last)};
}

Var fuse(Tape& tape, Var u_L, Var o, Var static_features, const ParameterSet& params) {
    Var proj = ops::matvec(tape.parameter(params, "Ws"), static_features);
    return ops::concat({ops::add(u_L, o), proj});
}

Tensor fuse(const Tensor& u_L, const Tensor& o, const std::vector<double>& static_features,
            const ParameterSet& params) {
    Tape tape;
    return fuse(tape, tape.constant(u_L), tape.constant(o), tape.constant(Tensor::vector(static_features)), params)
        .value();
}

Var predict(Tape& tape, Var v, Var w) {
    (void)tape;
    if (w.value().rank() != 2 || w.value().rows() != 2) {
        throw DimensionError("classifier weights must be 2 x dim(v), got " + w.value().shape_string());
    }
    return ops::softmax(ops::matvec(w, v));
}

std::array<double, 2> predict(const Tensor& v, const Tensor& w) {
    Tape tape;
    const Tensor& p = predict(tape, tape.constant(v), tape.constant(w)).value();
    return {p[0], p[1]};
}

ForwardVars forward(Tape& tape, const MemNet& model, const StayInput& input) {
    const auto& h = model.hyper;
    if (input.static_features.size() != h.static_dim) {
        throw DimensionError("static vector has " + std::to_string(input.static_features.size()) +
                             " entries, expected " + std::to_string(h.static_dim));
    }
    Var u = encode_notes(tape, model.params, input.notes);
    auto hop = multi_hop(tape, u, tape.constant(input.sequence), model.params, h.hops, h.memory_size);
    Var v = fuse(tape, hop.u, hop.last.o, tape.constant(Tensor::vector(input.static_features)), model.params);
    Var prob = predict(tape, v, tape.parameter(model.params, "w"));
    return {u, hop.u, hop.last.alpha, hop.last.o, v, prob};
}

Var total_loss(Tape& tape, const MemNet& model, const std::vector<StayInput>& inputs,
               const std::vector<int>& labels) {
    if (inputs.size() != labels.size()) throw DimensionError("inputs and labels differ in length");
    std::vector<Var> terms;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        auto f = forward(tape, model, inputs[i]);
        terms.push_back(ops::cross_entropy(ops::pick(f.prob, 1), labels[i]));
    }
    return ops::add_n(terms);
}

MemNetTraining train(const std::vector<StayInput>& inputs, const std::vector<int>& labels,
                     const HyperConfig& hyper, std::size_t vocab_size) {
    if (inputs.empty()) throw TrainingError("empty training set");
    if (inputs.size() != labels.size()) throw DimensionError("inputs and labels differ in length");
    require_both_classes(labels);
    MemNetTraining out{init_memnet(hyper, vocab_size, inputs.front().sequence.cols()), {}};
    MemNet& model = out.model;
    out.loss_history = train_minibatch(model.params, inputs.size(), hyper.train_options(),
                                       [&](Tape& tape, std::size_t i) {
                                           auto f = forward(tape, model, inputs[i]);
                                           return ops::cross_entropy(ops::pick(f.prob, 1), labels[i]);
                                       });
    return out;
}

Tensor embed_stays(const MemNet& model, const std::vector<StayInput>& inputs) {
    const std::size_t dim = model.hyper.repr_dim();
    Tensor out({inputs.size(), dim});
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Tape tape;
        const Tensor& v = forward(tape, model, inputs[i]).v.value();
        for (std::size_t k = 0; k < dim; ++k) out.at(i, k) = v[k];
    }
    return out;
}

std::vector<double> predict_proba(const MemNet& model, const std::vector<StayInput>& inputs) {
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) {
        Tape tape;
        out.push_back(forward(tape, model, in).prob.value()[1]);
    }
    return out;
}

}  // namespace akisub::model
