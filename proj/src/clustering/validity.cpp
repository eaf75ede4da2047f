#include "akisub/clustering/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "akisub/error.hpp"

namespace akisub::clustering {

namespace {

double dist(const Tensor& x, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const double t = x.at(i, c) - x.at(j, c);
        s += t * t;
    }
    return std::sqrt(s);
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double mcclain_rao(const Tensor& x, const std::vector<int>& labels, std::size_t k) {
    if (k < 2) throw ArgumentError("mcclain_rao needs k >= 2");
    if (labels.size() != x.rows()) throw DimensionError("labels do not match the row count");
    std::vector<std::size_t> count(k, 0);
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= k) throw ArgumentError("cluster label out of range");
        ++count[static_cast<std::size_t>(l)];
    }
    if (std::find(count.begin(), count.end(), 0u) != count.end()) throw ArgumentError("empty cluster");
    double sw = 0.0, sb = 0.0, nw = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            const double d = dist(x, i, j);
            if (labels[i] == labels[j]) {
                sw += d;
                nw += 1.0;
            } else {
                sb += d;
                nb += 1.0;
            }
        }
    if (nw == 0.0) return 0.0;  // all singletons
    if (sb == 0.0) return std::numeric_limits<double>::infinity();
    return (sw / nw) / (sb / nb);
}

KSelection select_k(const Tensor& x, const std::vector<std::size_t>& k_range, std::uint64_t seed,
                    std::size_t restarts) {
    if (k_range.empty()) throw ArgumentError("select_k: empty k range");
    KSelection sel;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : k_range) {
        if (k < 2 || k + 1 > x.rows()) throw ArgumentError("select_k: k must lie in [2, n - 1]");
        auto a = kmeans(x, k, seed, restarts);
        const double idx = mcclain_rao(x, a.labels, k);
        sel.ks.push_back(k);
        sel.index.push_back(idx);
        sel.assignments.push_back(std::move(a));
        if (idx < best || (idx == best && k < sel.best_k)) {
            best = idx;
            sel.best_k = k;
        }
    }
    if (sel.best_k == 0) sel.best_k = sel.ks.front();
    return sel;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw DimensionError("label vectors differ in length");
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [_, v] : joint) index += choose2(v);
    for (const auto& [_, v] : ra) sa += choose2(v);
    for (const auto& [_, v] : rb) sb += choose2(v);
    const double total = choose2(static_cast<double>(a.size()));
    if (total == 0.0) return 1.0;
    const double expected = sa * sb / total;
    const double max_index = 0.5 * (sa + sb);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

double silhouette(const Tensor& x, const std::vector<int>& labels) {
    const std::size_t n = x.rows();
    if (labels.size() != n) throw DimensionError("labels do not match the row count");
    std::map<int, std::size_t> sizes;
    for (int l : labels) ++sizes[l];
    if (sizes.size() < 2) throw ArgumentError("silhouette needs at least two clusters");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] < 2) continue;
        std::map<int, double> sum;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum[labels[j]] += dist(x, i, j);
        const double a = sum[labels[i]] / double(sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, s] : sum)
            if (l != labels[i]) b = std::min(b, s / double(sizes[l]));
        const double m = std::max(a, b);
        total += m > 0.0 ? (b - a) / m : 0.0;
    }
    return total / double(n);
}

}  // namespace akisub::clustering
