#include "akisub/numeric/adam.hpp"

#include <cmath>
#include <string>

#include "akisub/error.hpp"

namespace akisub::numeric {

void adam_step(std::string_view name, Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& config) {
    if (param.shape() != grad.shape() || state.m.shape() != param.shape() ||
        state.s.shape() != param.shape()) {
        throw DimensionError("adam_step '" + std::string(name) + "': param " + param.shape_string() +
                             ", grad " + grad.shape_string());
    }
    if (!(config.learning_rate > 0.0)) {
        throw ArgumentError("adam_step: learning rate must be positive");
    }
    if (!grad.all_finite()) {
        throw OptimizationError("non-finite gradient for parameter '" + std::string(name) + "'");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    auto p = param.values();
    auto g = grad.values();
    auto m = state.m.values();
    auto s = state.s.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
        s[i] = config.beta2 * s[i] + (1.0 - config.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double s_hat = s[i] / bc2;
        p[i] -= config.learning_rate * m_hat / (std::sqrt(s_hat) + config.epsilon);
    }
}

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
    states_.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) states_.push_back(AdamState::for_param(params.value(i)));
}

void Adam::step(ParameterSet& params, const std::vector<Tensor>& grads) {
    if (grads.size() != params.size()) {
        throw DimensionError("Adam::step: " + std::to_string(grads.size()) + " gradients for " +
                             std::to_string(params.size()) + " parameters");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        adam_step(params.name(i), params.value(i), grads[i], states_[i], config_);
    }
}

}  // namespace akisub::numeric
