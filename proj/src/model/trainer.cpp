#include "akisub/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "akisub/error.hpp"
#include "akisub/numeric/adam.hpp"
#include "akisub/numeric/ops.hpp"

namespace akisub::model {

void require_both_classes(const std::vector<int>& labels) {
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y != 0 && y != 1) throw TrainingError("labels must be 0 or 1");
        (y == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) throw TrainingError("training set must contain both classes");
}

std::vector<double> train_minibatch(numeric::ParameterSet& params, std::size_t n_samples,
                                    const TrainOptions& options, const LossBuilder& loss) {
    if (n_samples == 0) throw TrainingError("empty training set");
    if (options.batch_size == 0) throw ConfigError("batch_size must be positive");
    numeric::Adam adam(params, numeric::AdamConfig{options.learning_rate, 0.9, 0.999, 1e-8});
    numeric::Rng rng(options.seed);
    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> history;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double total = 0.0;
        for (std::size_t start = 0; start < n_samples; start += options.batch_size) {
            const std::size_t stop = std::min(n_samples, start + options.batch_size);
            numeric::Tape tape;
            std::vector<numeric::Var> terms;
            for (std::size_t k = start; k < stop; ++k) terms.push_back(loss(tape, order[k]));
            numeric::Var batch_loss = numeric::add_n(terms);
            total += batch_loss.value().item();
            tape.backward(batch_loss);
            adam.step(params, tape.parameter_gradients(params));
        }
        const double mean = total / static_cast<double>(n_samples);
        if (!std::isfinite(mean)) throw TrainingError("loss diverged in epoch " + std::to_string(epoch + 1));
        history.push_back(mean);
    }
    return history;
}

}  // namespace akisub::model
