#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "akisub/numeric/tape.hpp"
#include "akisub/numeric/tensor.hpp"

namespace akisub::clustering {

using numeric::Tensor;

enum class Activation { tanh, linear };

struct AutoencoderConfig {
    std::size_t hidden = 32;
    std::size_t bottleneck = 2;
    Activation activation = Activation::tanh;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
    double init_scale = 0.1;
};

/// d -> hidden -> bottleneck -> hidden -> d with the activation on the two
/// hidden layers; bottleneck and output layers are linear.
struct Autoencoder {
    AutoencoderConfig config;
    std::size_t input_dim = 0;
    numeric::ParameterSet params;
};

Autoencoder init_autoencoder(std::size_t input_dim, const AutoencoderConfig& config);

/// Squared reconstruction error of one row, recorded on `tape`.
numeric::Var reconstruction_loss(numeric::Tape& tape, const Autoencoder& ae, std::span<const double> row);

struct AutoencoderFit {
    Autoencoder model;
    std::vector<double> loss_history;
};
AutoencoderFit train_autoencoder(const Tensor& x, const AutoencoderConfig& config);

Tensor encode(const Autoencoder& ae, const Tensor& x);
/// Mean squared reconstruction error per row.
double reconstruction_error(const Autoencoder& ae, const Tensor& x);

/// Trains on x and returns the n x bottleneck codes.
Tensor autoencoder_embed(const Tensor& x, const AutoencoderConfig& config = {});

}  // namespace akisub::clustering
