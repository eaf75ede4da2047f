#pragma once

#include <cstddef>
#include <vector>

#include "akisub/numeric/tensor.hpp"

namespace akisub::clustering {

using numeric::Tensor;

struct PcaResult {
    Tensor projection;                 // n x k, mean-centred scores
    Tensor components;                 // k x d, unit rows
    std::vector<double> eigenvalues;   // covariance eigenvalues (n - 1 denominator)
    std::vector<double> mean;          // d
};

/// Top principal directions by power iteration with deflation. Each
/// component is signed so its largest-magnitude coordinate is positive.
/// Throws DegenerateInputError on zero total variance, ArgumentError for
/// n < 2, d < 2 or out_dim > d.
PcaResult pca(const Tensor& x, std::size_t out_dim = 2);
Tensor pca_project(const Tensor& x, std::size_t out_dim = 2);

/// Mean squared reconstruction error per row from the retained components.
double pca_reconstruction_error(const Tensor& x, const PcaResult& fit);

}  // namespace akisub::clustering
