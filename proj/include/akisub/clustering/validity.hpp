#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "akisub/clustering/kmeans.hpp"

namespace akisub::clustering {

/// Mean within-cluster pairwise Euclidean distance over the mean
/// between-cluster distance; lower is better. Throws ArgumentError for k < 2
/// or an empty cluster.
double mcclain_rao(const Tensor& x, const std::vector<int>& labels, std::size_t k);

struct KSelection {
    std::size_t best_k = 0;
    std::vector<std::size_t> ks;
    std::vector<double> index;
    std::vector<ClusterAssignment> assignments;
};

/// k-means per k and the McClain-Rao argmin (ties to the smaller k).
KSelection select_k(const Tensor& x, const std::vector<std::size_t>& k_range, std::uint64_t seed,
                    std::size_t restarts = 10);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Mean silhouette width; singleton clusters contribute 0.
double silhouette(const Tensor& x, const std::vector<int>& labels);

}  // namespace akisub::clustering
