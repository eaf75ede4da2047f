#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "akisub/numeric/tensor.hpp"

namespace akisub::clustering {

using numeric::Tensor;

struct ClusterAssignment {
    std::vector<int> labels;  // in [0, k)
    Tensor centroids;         // k x d
    double inertia = 0.0;     // sum of squared distances to own centroid
    std::size_t iterations = 0;
    std::vector<double> inertia_history;  // after every Lloyd iteration of the kept restart
};

/// k-means++ seeding then Lloyd iterations until the assignment stops changing
/// or max_iter; best of `restarts` by inertia. An emptied cluster takes the
/// point farthest from its centroid. Throws ArgumentError for k = 0 or k > n.
ClusterAssignment kmeans(const Tensor& x, std::size_t k, std::uint64_t seed, std::size_t restarts = 10,
                         std::size_t max_iter = 300);

/// Sum of squared distances of rows to the mean of their label group.
double inertia_of(const Tensor& x, const std::vector<int>& labels, std::size_t k);

}  // namespace akisub::clustering
