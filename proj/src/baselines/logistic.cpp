#include "akisub/baselines/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "akisub/error.hpp"
#include "akisub/model/trainer.hpp"

namespace akisub::baselines {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Matrix standardized(const LrParams& p, const Matrix& x) {
    Matrix out = x;
    for (auto& row : out) {
        if (row.size() != p.mean.size()) throw DimensionError("feature width does not match the model");
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - p.mean[j]) / p.scale[j];
    }
    return out;
}

double linear(const LrParams& p, const std::vector<double>& z) {
    double s = p.bias;
    for (std::size_t j = 0; j < z.size(); ++j) s += p.weights[j] * z[j];
    return s;
}

// Largest eigenvalue of Z^T Z / n by power iteration.
double gram_spectral_norm(const Matrix& z) {
    const std::size_t n = z.size(), d = z.front().size();
    std::vector<double> v(d + 1, 1.0 / std::sqrt(double(d + 1))), w(d + 1);
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        std::fill(w.begin(), w.end(), 0.0);
        for (const auto& row : z) {
            double s = v[d];
            for (std::size_t j = 0; j < d; ++j) s += row[j] * v[j];
            for (std::size_t j = 0; j < d; ++j) w[j] += s * row[j];
            w[d] += s;
        }
        double norm = 0.0;
        for (double& x : w) {
            x /= static_cast<double>(n);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (std::size_t j = 0; j <= d; ++j) v[j] = w[j] / norm;
        if (std::abs(norm - lambda) < 1e-9 * norm) return norm;
        lambda = norm;
    }
    return lambda;
}

LrGradient standardized_gradient(const LrParams& p, const Matrix& z, const std::vector<int>& labels) {
    const std::size_t n = z.size(), d = p.weights.size();
    LrGradient g{std::vector<double>(d, 0.0), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double r = sigmoid(linear(p, z[i])) - labels[i];
        for (std::size_t j = 0; j < d; ++j) g.weights[j] += r * z[i][j];
        g.bias += r;
    }
    for (std::size_t j = 0; j < d; ++j) g.weights[j] = g.weights[j] / double(n) + p.l2 * p.weights[j];
    g.bias /= double(n);
    return g;
}

}  // namespace

LrParams lr_train(const Matrix& features, const std::vector<int>& labels, const LrOptions& options) {
    if (features.empty()) throw TrainingError("empty training set");
    if (features.size() != labels.size()) throw DimensionError("features and labels differ in length");
    model::require_both_classes(labels);
    if (!(options.l2 >= 0.0)) throw ConfigError("l2 must be non-negative");
    const std::size_t n = features.size(), d = features.front().size();
    LrParams p;
    p.l2 = options.l2;
    p.weights.assign(d, 0.0);
    p.mean.assign(d, 0.0);
    p.scale.assign(d, 1.0);
    if (options.standardize) {
        for (const auto& row : features) {
            if (row.size() != d) throw DimensionError("ragged feature matrix");
            for (std::size_t j = 0; j < d; ++j) p.mean[j] += row[j] / double(n);
        }
        for (std::size_t j = 0; j < d; ++j) {
            double v = 0.0;
            for (const auto& row : features) v += (row[j] - p.mean[j]) * (row[j] - p.mean[j]);
            v = std::sqrt(v / double(n));
            p.scale[j] = v > 1e-12 ? v : 1.0;
        }
    }
    const Matrix z = standardized(p, features);
    double step = options.learning_rate;
    if (step <= 0.0) step = 1.0 / (0.25 * gram_spectral_norm(z) + options.l2 + 1e-12);
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        const LrGradient g = standardized_gradient(p, z, labels);
        for (std::size_t j = 0; j < d; ++j) p.weights[j] -= step * g.weights[j];
        p.bias -= step * g.bias;
    }
    for (double w : p.weights)
        if (!std::isfinite(w)) throw TrainingError("logistic regression diverged");
    return p;
}

double lr_predict(const LrParams& params, const std::vector<double>& x) {
    if (x.size() != params.weights.size()) throw DimensionError("feature width does not match the model");
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - params.mean[j]) / params.scale[j];
    return sigmoid(linear(params, z));
}

std::vector<double> lr_predict(const LrParams& params, const Matrix& features) {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& x : features) out.push_back(lr_predict(params, x));
    return out;
}

LrGradient lr_gradient(const LrParams& params, const Matrix& features, const std::vector<int>& labels) {
    if (features.size() != labels.size()) throw DimensionError("features and labels differ in length");
    return standardized_gradient(params, standardized(params, features), labels);
}

double lr_objective(const LrParams& params, const Matrix& features, const std::vector<int>& labels) {
    const Matrix z = standardized(params, features);
    double nll = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = linear(params, z[i]);
        nll += softplus(s) - labels[i] * s;
    }
    double reg = 0.0;
    for (double w : params.weights) reg += w * w;
    return nll / double(z.size()) + 0.5 * params.l2 * reg;
}

}  // namespace akisub::baselines
