#include "akisub/baselines/sequence_models.hpp"

#include "akisub/error.hpp"
#include "akisub/numeric/ops.hpp"

namespace akisub::baselines {

namespace ops = numeric;
using numeric::Tape;
using numeric::Tensor;
using numeric::Var;

SequenceModel init_lstm_baseline(const HyperConfig& hyper, std::size_t n_vars) {
    model::validate(hyper);
    if (n_vars == 0) throw ConfigError("LSTM baseline needs at least one variable");
    SequenceModel m{SequenceKind::lstm, hyper, 0, n_vars, {}};
    numeric::Rng rng(hyper.seed);
    const double a = hyper.init_scale;
    const std::size_t h = hyper.emb_dim;
    m.params.add("lstm_W", numeric::uniform_tensor({4 * h, n_vars + h}, -a, a, rng));
    Tensor b = numeric::uniform_tensor({4 * h}, -a, a, rng);
    for (std::size_t k = h; k < 2 * h; ++k) b[k] = 1.0;
    m.params.add("lstm_b", std::move(b));
    m.params.add("head_W", numeric::uniform_tensor({2, h + hyper.static_dim}, -a, a, rng));
    m.params.add("head_b", Tensor({2}));
    return m;
}

SequenceModel init_hielstm_only(const HyperConfig& hyper, std::size_t vocab_size) {
    model::validate(hyper);
    SequenceModel m{SequenceKind::hielstm, hyper, vocab_size, 0, {}};
    numeric::Rng rng(hyper.seed);
    const double a = hyper.init_scale;
    model::add_hielstm_params(m.params, {vocab_size, hyper.word_dim, hyper.bottom_hidden, hyper.top_hidden}, rng,
                              "", a);
    m.params.add("head_W", numeric::uniform_tensor({2, hyper.top_hidden}, -a, a, rng));
    m.params.add("head_b", Tensor({2}));
    return m;
}

Var sequence_forward(Tape& tape, const SequenceModel& model, const StayInput& input) {
    Var features;
    if (model.kind == SequenceKind::lstm) {
        const Tensor& s = input.sequence;
        if (s.rank() != 2 || s.cols() != model.n_vars) {
            throw DimensionError("sequence " + s.shape_string() + " does not match " +
                                 std::to_string(model.n_vars) + " variables");
        }
        if (input.static_features.size() != model.hyper.static_dim) {
            throw DimensionError("static vector width mismatch");
        }
        Var seq = tape.constant(s);
        std::vector<Var> rows;
        for (std::size_t j = 0; j < s.rows(); ++j) rows.push_back(ops::row(seq, j));
        Var h = model::run_lstm(tape, rows, tape.parameter(model.params, "lstm_W"),
                                tape.parameter(model.params, "lstm_b"), model.hyper.emb_dim);
        features = ops::concat({h, tape.constant(Tensor::vector(input.static_features))});
    } else {
        features = model::encode_notes(tape, model.params, input.notes);
    }
    Var logits = ops::add(ops::matvec(tape.parameter(model.params, "head_W"), features),
                          tape.parameter(model.params, "head_b"));
    return ops::softmax(logits);
}

Var sequence_total_loss(Tape& tape, const SequenceModel& model, const std::vector<StayInput>& inputs,
                        const std::vector<int>& labels) {
    if (inputs.size() != labels.size()) throw DimensionError("inputs and labels differ in length");
    std::vector<Var> terms;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        terms.push_back(ops::cross_entropy(ops::pick(sequence_forward(tape, model, inputs[i]), 1), labels[i]));
    }
    return ops::add_n(terms);
}

namespace {

SequenceTraining fit(SequenceModel m, const std::vector<StayInput>& inputs, const std::vector<int>& labels) {
    if (inputs.empty()) throw TrainingError("empty training set");
    if (inputs.size() != labels.size()) throw DimensionError("inputs and labels differ in length");
    model::require_both_classes(labels);
    SequenceTraining out{std::move(m), {}};
    SequenceModel& model = out.model;
    out.loss_history = model::train_minibatch(model.params, inputs.size(), model.hyper.train_options(),
                                              [&](Tape& tape, std::size_t i) {
                                                  return ops::cross_entropy(
                                                      ops::pick(sequence_forward(tape, model, inputs[i]), 1),
                                                      labels[i]);
                                              });
    return out;
}

}  // namespace

SequenceTraining lstm_baseline_train(const std::vector<StayInput>& inputs, const std::vector<int>& labels,
                                     const HyperConfig& hyper) {
    if (inputs.empty()) throw TrainingError("empty training set");
    return fit(init_lstm_baseline(hyper, inputs.front().sequence.cols()), inputs, labels);
}

SequenceTraining hielstm_only_train(const std::vector<StayInput>& inputs, const std::vector<int>& labels,
                                    const HyperConfig& hyper, std::size_t vocab_size) {
    return fit(init_hielstm_only(hyper, vocab_size), inputs, labels);
}

std::vector<double> predict_proba(const SequenceModel& model, const std::vector<StayInput>& inputs) {
    std::vector<double> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) {
        Tape tape;
        out.push_back(sequence_forward(tape, model, in).value()[1]);
    }
    return out;
}

}  // namespace akisub::baselines
