#include "akisub/clustering/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "akisub/error.hpp"

namespace akisub::clustering {

namespace {

constexpr double kFloor = 1e-12;

// Conditional p_{j|i} for one row, bandwidth found by bisection on beta.
void row_affinities(const std::vector<double>& d2, std::size_t i, std::size_t n, double log_perp,
                    double* out) {
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) dmin = std::min(dmin, d2[i * n + j]);
    for (int it = 0; it < 200; ++it) {
        double sum = 0.0, wsum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                out[j] = 0.0;
                continue;
            }
            const double dj = d2[i * n + j] - dmin;  // shift for stability
            out[j] = std::exp(-beta * dj);
            sum += out[j];
            wsum += out[j] * dj;
        }
        const double entropy = std::log(sum) + beta * wsum / sum;
        for (std::size_t j = 0; j < n; ++j) out[j] /= sum;
        const double diff = entropy - log_perp;
        if (std::abs(diff) < 1e-8) break;
        if (diff > 0.0) {
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
        } else {
            hi = beta;
            beta = (beta + lo) / 2.0;
        }
    }
}

}  // namespace

std::vector<double> tsne_affinities(const Tensor& x, double perplexity) {
    const std::size_t n = x.rows(), d = x.cols();
    if (!(perplexity > 0.0) || static_cast<double>(n) <= 3.0 * perplexity) {
        throw ArgumentError("t-SNE perplexity " + std::to_string(perplexity) + " infeasible for " +
                            std::to_string(n) + " points (need n > 3 * perplexity)");
    }
    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double t = x.at(i, k) - x.at(j, k);
                s += t * t;
            }
            d2[i * n + j] = d2[j * n + i] = s;
        }
    std::vector<double> cond(n * n);
    const double log_perp = std::log(perplexity);
    for (std::size_t i = 0; i < n; ++i) row_affinities(d2, i, n, log_perp, &cond[i * n]);
    std::vector<double> p(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p[i * n + j] = i == j ? 0.0 : std::max((cond[i * n + j] + cond[j * n + i]) / (2.0 * n), kFloor);
    // the floor adds mass; put the total back to one
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    return p;
}

TsneResult tsne(const Tensor& x, const TsneConfig& c) {
    if (x.rank() != 2 || x.rows() < 2) throw ArgumentError("t-SNE needs an n x d matrix");
    const std::size_t n = x.rows();
    const std::vector<double> p = tsne_affinities(x, c.perplexity);
    const double lr = c.learning_rate > 0.0 ? c.learning_rate : std::max(double(n) / 12.0, 1.0);

    numeric::Rng rng(c.seed);
    std::normal_distribution<double> normal(0.0, 1e-2);
    std::vector<double> y(2 * n), update(2 * n, 0.0), gains(2 * n, 1.0), grad(2 * n);
    for (double& v : y) v = normal(rng);
    std::vector<double> num(n * n);
    TsneResult result;

    for (std::size_t iter = 0; iter < c.iterations; ++iter) {
        const double exag = iter < c.exaggeration_iters ? c.early_exaggeration : 1.0;
        const double momentum = iter < c.exaggeration_iters ? c.initial_momentum : c.final_momentum;
        double zsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num[i * n + i] = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[2 * i] - y[2 * j], dy = y[2 * i + 1] - y[2 * j + 1];
                const double q = 1.0 / (1.0 + dx * dx + dy * dy);
                num[i * n + j] = num[j * n + i] = q;
                zsum += 2.0 * q;
            }
        }
        const bool record = c.kl_every > 0 && (iter % c.kl_every == 0 || iter + 1 == c.iterations);
        if (record) {
            double kl = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double q = std::max(num[i * n + j] / zsum, kFloor);
                    kl += p[i * n + j] * std::log(p[i * n + j] / q);
                }
            result.kl_iterations.push_back(iter);
            result.kl_history.push_back(std::max(kl, 0.0));
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double w = num[i * n + j];
                const double m = (exag * p[i * n + j] - w / zsum) * w;
                grad[2 * i] += 4.0 * m * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += 4.0 * m * (y[2 * i + 1] - y[2 * j + 1]);
            }
        for (std::size_t k = 0; k < 2 * n; ++k) {
            const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
            gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
            update[k] = momentum * update[k] - lr * gains[k] * grad[k];
            y[k] += update[k];
        }
        // recentre
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) mx += y[2 * i], my += y[2 * i + 1];
        mx /= double(n), my /= double(n);
        for (std::size_t i = 0; i < n; ++i) y[2 * i] -= mx, y[2 * i + 1] -= my;
    }
    result.embedding = Tensor({n, 2}, y);
    for (double v : y)
        if (!std::isfinite(v)) throw OptimizationError("t-SNE layout diverged");
    return result;
}

Tensor tsne_embed(const Tensor& x, double perplexity, std::size_t iterations, std::uint64_t seed) {
    TsneConfig c;
    c.perplexity = perplexity;
    c.iterations = iterations;
    c.seed = seed;
    return tsne(x, c).embedding;
}

}  // namespace akisub::clustering
