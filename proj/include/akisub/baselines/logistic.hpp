#pragma once

#include <cstddef>
#include <vector>

namespace akisub::baselines {

using Matrix = std::vector<std::vector<double>>;

struct LrOptions {
    double l2 = 1e-3;
    std::size_t epochs = 1000;
    /// Fixed gradient step; 0 picks 1 / (Lipschitz bound of the objective).
    double learning_rate = 0.0;
    bool standardize = true;
};

/// Weights act on standardized features (x - mean) / scale; the bias is not
/// penalised.
struct LrParams {
    std::vector<double> weights;
    double bias = 0.0;
    double l2 = 0.0;
    std::vector<double> mean;
    std::vector<double> scale;
};

/// Full-batch gradient descent on mean NLL + l2/2 |w|^2. Throws TrainingError
/// unless both classes occur.
LrParams lr_train(const Matrix& features, const std::vector<int>& labels, const LrOptions& options = {});

double lr_predict(const LrParams& params, const std::vector<double>& x);
std::vector<double> lr_predict(const LrParams& params, const Matrix& features);

struct LrGradient {
    std::vector<double> weights;
    double bias = 0.0;
};
/// Analytic gradient of lr_objective with respect to weights and bias.
LrGradient lr_gradient(const LrParams& params, const Matrix& features, const std::vector<int>& labels);
/// Objective minimised by lr_train at the given parameters.
double lr_objective(const LrParams& params, const Matrix& features, const std::vector<int>& labels);

}  // namespace akisub::baselines
