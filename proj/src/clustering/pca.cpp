#include "akisub/clustering/pca.hpp"

#include <algorithm>
#include <cmath>

#include "akisub/error.hpp"

namespace akisub::clustering {

namespace {

std::vector<double> mat_vec(const std::vector<double>& c, std::size_t d, const std::vector<double>& v) {
    std::vector<double> out(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i] += c[i * d + j] * v[j];
    return out;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
    for (const auto& b : basis) {
        double p = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) p += v[i] * b[i];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
    }
}

}  // namespace

PcaResult pca(const Tensor& x, std::size_t out_dim) {
    if (x.rank() != 2 || x.rows() < 2 || x.cols() < 2) throw ArgumentError("pca needs an n x d matrix with n, d >= 2");
    const std::size_t n = x.rows(), d = x.cols();
    if (out_dim == 0 || out_dim > d) throw ArgumentError("pca output dimension must lie in [1, d]");
    PcaResult r;
    r.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) r.mean[j] += x.at(i, j) / double(n);
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = x.at(i, a) - r.mean[a];
            for (std::size_t b = a; b < d; ++b) cov[a * d + b] += xa * (x.at(i, b) - r.mean[b]);
        }
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov[a * d + b] /= double(n - 1);
            cov[b * d + a] = cov[a * d + b];
        }
        trace += cov[a * d + a];
    }
    if (!(trace > 0.0)) throw DegenerateInputError("pca: input has zero variance");

    std::vector<std::vector<double>> basis;
    for (std::size_t k = 0; k < out_dim; ++k) {
        // start from the deflated covariance column of largest norm
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> col(d);
            for (std::size_t i = 0; i < d; ++i) col[i] = cov[i * d + j];
            const double nn = norm(col);
            if (nn > best_norm) best_norm = nn, best = j;
        }
        std::vector<double> v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = cov[i * d + best];
        double lambda = 0.0;
        if (best_norm <= 1e-14 * trace) {
            // remaining spectrum is zero: any orthonormal completion will do
            for (std::size_t e = 0; e < d; ++e) {
                std::fill(v.begin(), v.end(), 0.0);
                v[e] = 1.0;
                orthogonalize(v, basis);
                if (norm(v) > 1e-6) break;
            }
        } else {
            for (int it = 0; it < 20000; ++it) {
                std::vector<double> w = mat_vec(cov, d, v);
                orthogonalize(w, basis);
                const double nw = norm(w);
                if (nw == 0.0) break;
                double diff = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    w[i] /= nw;
                    diff = std::max(diff, std::abs(w[i] - v[i]));
                }
                v.swap(w);
                if (diff < 1e-13) break;
            }
        }
        const double nv = norm(v);
        for (double& e : v) e /= nv;
        const auto cv = mat_vec(cov, d, v);
        for (std::size_t i = 0; i < d; ++i) lambda += v[i] * cv[i];
        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
        if (v[arg] < 0.0)
            for (double& e : v) e = -e;
        // deflate
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) cov[a * d + b] -= lambda * v[a] * v[b];
        r.eigenvalues.push_back(std::max(lambda, 0.0));
        basis.push_back(v);
    }
    r.components = Tensor({out_dim, d});
    r.projection = Tensor({n, out_dim});
    for (std::size_t k = 0; k < out_dim; ++k)
        for (std::size_t j = 0; j < d; ++j) r.components.at(k, j) = basis[k][j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < out_dim; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += (x.at(i, j) - r.mean[j]) * basis[k][j];
            r.projection.at(i, k) = s;
        }
    return r;
}

Tensor pca_project(const Tensor& x, std::size_t out_dim) { return pca(x, out_dim).projection; }

double pca_reconstruction_error(const Tensor& x, const PcaResult& fit) {
    const std::size_t n = x.rows(), d = x.cols(), k = fit.components.rows();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double rec = fit.mean[j];
            for (std::size_t c = 0; c < k; ++c) rec += fit.projection.at(i, c) * fit.components.at(c, j);
            err += (x.at(i, j) - rec) * (x.at(i, j) - rec);
        }
    return err / double(n);
}

}  // namespace akisub::clustering
