#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "akisub/numeric/tensor.hpp"

namespace akisub::clustering {

using numeric::Tensor;

struct TsneConfig {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    /// 0 selects n / 12.
    double learning_rate = 0.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t kl_every = 50;
    std::uint64_t seed = 1;
};

struct TsneResult {
    Tensor embedding;  // n x 2
    std::vector<std::size_t> kl_iterations;
    std::vector<double> kl_history;  // KL(P || Q) with unexaggerated P
};

/// Exact t-SNE. Throws ArgumentError unless n > 3 * perplexity.
TsneResult tsne(const Tensor& x, const TsneConfig& config = {});
Tensor tsne_embed(const Tensor& x, double perplexity, std::size_t iterations, std::uint64_t seed);

/// Symmetrised input affinities p_ij (row-major n x n, summing to 1).
std::vector<double> tsne_affinities(const Tensor& x, double perplexity);

}  // namespace akisub::clustering
