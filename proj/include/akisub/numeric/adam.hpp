#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "akisub/numeric/tape.hpp"
#include "akisub/numeric/tensor.hpp"

namespace akisub::numeric {

struct AdamConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    Tensor m;  // first moment
    Tensor s;  // second moment, element-wise >= 0
    std::int64_t step = 0;

    static AdamState for_param(const Tensor& param) {
        return AdamState{Tensor::zeros_like(param), Tensor::zeros_like(param), 0};
    }
};

/// Bias-corrected Adam update in place. Throws OptimizationError naming
/// `name` when the gradient has a non-finite entry.
void adam_step(std::string_view name, Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& config);

class Adam {
   public:
    Adam(const ParameterSet& params, AdamConfig config);

    void step(ParameterSet& params, const std::vector<Tensor>& grads);
    const AdamState& state(std::size_t i) const { return states_[i]; }
    const AdamConfig& config() const { return config_; }

   private:
    AdamConfig config_;
    std::vector<AdamState> states_;
};

}  // namespace akisub::numeric
