#include "akisub/clustering/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "akisub/error.hpp"

namespace akisub::clustering {

namespace {

double sq_dist(const Tensor& x, std::size_t i, const Tensor& c, std::size_t k) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double t = x.at(i, j) - c.at(k, j);
        s += t * t;
    }
    return s;
}

Tensor plus_plus(const Tensor& x, std::size_t k, numeric::Rng& rng) {
    const std::size_t n = x.rows(), d = x.cols();
    Tensor c({k, d});
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t first = pick(rng);
    for (std::size_t j = 0; j < d; ++j) c.at(0, j) = x.at(first, j);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = sq_dist(x, i, c, 0);
    for (std::size_t m = 1; m < k; ++m) {
        double total = 0.0;
        for (double v : dist) total += v;
        std::size_t chosen = 0;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                if (r < dist[i]) {
                    chosen = i;
                    break;
                }
                r -= dist[i];
            }
        } else {
            chosen = pick(rng);
        }
        for (std::size_t j = 0; j < d; ++j) c.at(m, j) = x.at(chosen, j);
        for (std::size_t i = 0; i < n; ++i) dist[i] = std::min(dist[i], sq_dist(x, i, c, m));
    }
    return c;
}

// Recomputes centroids; refills empty clusters with the worst-fit point.
void update_centroids(const Tensor& x, std::vector<int>& labels, Tensor& c) {
    const std::size_t n = x.rows(), d = x.cols(), k = c.rows();
    for (;;) {
        std::vector<std::size_t> count(k, 0);
        for (int l : labels) ++count[static_cast<std::size_t>(l)];
        auto empty = std::find(count.begin(), count.end(), 0u);
        if (empty == count.end()) break;
        std::size_t worst = 0;
        double worst_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (count[static_cast<std::size_t>(labels[i])] < 2) continue;
            const double dd = sq_dist(x, i, c, static_cast<std::size_t>(labels[i]));
            if (dd > worst_d) worst_d = dd, worst = i;
        }
        labels[worst] = static_cast<int>(empty - count.begin());
    }
    c.fill(0.0);
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        count[l] += 1.0;
        for (std::size_t j = 0; j < d; ++j) c.at(l, j) += x.at(i, j);
    }
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < d; ++j) c.at(l, j) /= count[l];
}

ClusterAssignment lloyd(const Tensor& x, std::size_t k, numeric::Rng& rng, std::size_t max_iter) {
    const std::size_t n = x.rows();
    ClusterAssignment a;
    a.centroids = plus_plus(x, k, rng);
    a.labels.assign(n, -1);
    for (std::size_t it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < k; ++m) {
                const double dd = sq_dist(x, i, a.centroids, m);
                if (dd < best_d) best_d = dd, best = static_cast<int>(m);
            }
            if (a.labels[i] != best) {
                // keep the current label on exact ties
                if (a.labels[i] < 0 || sq_dist(x, i, a.centroids, static_cast<std::size_t>(a.labels[i])) > best_d) {
                    a.labels[i] = best;
                    changed = true;
                }
            }
        }
        a.iterations = it + 1;
        if (!changed && it > 0) break;
        update_centroids(x, a.labels, a.centroids);
        a.inertia_history.push_back(inertia_of(x, a.labels, k));
    }
    a.inertia = inertia_of(x, a.labels, k);
    return a;
}

}  // namespace

double inertia_of(const Tensor& x, const std::vector<int>& labels, std::size_t k) {
    const std::size_t d = x.cols();
    Tensor c({k, d});
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        count[l] += 1.0;
        for (std::size_t j = 0; j < d; ++j) c.at(l, j) += x.at(i, j);
    }
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < d; ++j)
            if (count[l] > 0) c.at(l, j) /= count[l];
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) s += sq_dist(x, i, c, static_cast<std::size_t>(labels[i]));
    return s;
}

ClusterAssignment kmeans(const Tensor& x, std::size_t k, std::uint64_t seed, std::size_t restarts,
                         std::size_t max_iter) {
    if (x.rank() != 2 || x.rows() == 0) throw ArgumentError("kmeans needs a non-empty n x d matrix");
    if (k == 0 || k > x.rows()) {
        throw ArgumentError("kmeans: k = " + std::to_string(k) + " must lie in [1, n = " +
                            std::to_string(x.rows()) + "]");
    }
    numeric::Rng rng(seed);
    ClusterAssignment best;
    bool have = false;
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        ClusterAssignment a = lloyd(x, k, rng, std::max<std::size_t>(max_iter, 1));
        if (!have || a.inertia < best.inertia) {
            best = std::move(a);
            have = true;
        }
    }
    return best;
}

}  // namespace akisub::clustering
