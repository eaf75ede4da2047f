#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace akisub::numeric {

using Shape = std::vector<std::size_t>;
using Rng = std::mt19937_64;

/// Dense row-major array of doubles. Plain value type: copies are deep and
/// independent, so a const Tensor can be shared freely between threads.
class Tensor {
   public:
    Tensor() = default;
    explicit Tensor(Shape shape);
    Tensor(Shape shape, std::vector<double> values);

    static Tensor scalar(double value);
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    // rank-2 helpers; a rank-1 tensor is treated as a column
    std::size_t rows() const;
    std::size_t cols() const;

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<const double> row(std::size_t r) const;
    std::span<double> row(std::size_t r);
    std::vector<double>& storage() { return values_; }
    const std::vector<double>& storage() const { return values_; }

    double item() const;
    bool all_finite() const;
    void fill(double value);

    std::string shape_string() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

   private:
    Shape shape_;
    std::vector<double> values_;
};

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

Tensor uniform_tensor(Shape shape, double lo, double hi, Rng& rng);

/// FNV-1a over the raw bytes of the values; used for purity/determinism checks.
std::uint64_t checksum(const Tensor& t);

}  // namespace akisub::numeric
