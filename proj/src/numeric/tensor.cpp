#include "akisub/numeric/tensor.hpp"

#include <cmath>
#include <cstring>
#include <numeric>

#include "akisub/error.hpp"

namespace akisub::numeric {

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), values_(shape_size(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_size(shape_) != values_.size()) {
        throw DimensionError("tensor shape " + akisub::numeric::shape_string(shape_) + " holds " +
                             std::to_string(shape_size(shape_)) + " values, got " +
                             std::to_string(values_.size()));
    }
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
    Shape s{values.size()};
    return Tensor(std::move(s), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
    if (shape_.empty()) return 1;
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (shape_.size() < 2) return 1;
    return shape_[1];
}

std::span<const double> Tensor::row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
}

std::span<double> Tensor::row(std::size_t r) {
    return std::span<double>(values_).subspan(r * cols(), cols());
}

double Tensor::item() const {
    if (values_.size() != 1) {
        throw DimensionError("item() on tensor of shape " + shape_string());
    }
    return values_[0];
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

std::string Tensor::shape_string() const { return akisub::numeric::shape_string(shape_); }

Tensor uniform_tensor(Shape shape, double lo, double hi, Rng& rng) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : t.values()) v = dist(rng);
    return t;
}

std::uint64_t checksum(const Tensor& t) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : t.values()) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace akisub::numeric
