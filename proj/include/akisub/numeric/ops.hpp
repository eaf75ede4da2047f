#pragma once

#include <span>
#include <vector>

#include "akisub/numeric/tape.hpp"
#include "akisub/numeric/tensor.hpp"

namespace akisub::numeric {

inline constexpr double kProbabilityEpsilon = 1e-12;

// ---------------------------------------------------------------------------
// Value-level kernels (no tape)
// ---------------------------------------------------------------------------

/// Max-subtracted softmax. Throws ArgumentError on empty input.
std::vector<double> softmax(std::span<const double> logits);

/// -[y log p + (1-y) log(1-p)] with p clamped to [eps, 1-eps].
double cross_entropy(double p, int label);

Tensor matmul(const Tensor& a, const Tensor& b);

struct LstmForward {
    std::vector<double> h;
    std::vector<double> c;
    std::vector<double> gates;   // activated i, f, g, o (4H)
    std::vector<double> tanh_c;  // tanh(c')
};

/// Standard LSTM cell. W is (4H x (D+H)) with gate blocks ordered i, f, g, o;
/// b is (4H).
LstmForward lstm_cell(std::span<const double> x, std::span<const double> h,
                      std::span<const double> c, const Tensor& W, const Tensor& b);

// ---------------------------------------------------------------------------
// Recorded operations
// ---------------------------------------------------------------------------

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var add_n(const std::vector<Var>& terms);

Var matmul(Var a, Var b);
/// M (m x k) times x (k) -> (m)
Var matvec(Var m, Var x);
/// x (m) times M (m x k) -> (k), i.e. M^T x
Var vecmat(Var x, Var m);

/// (m x k) -> (k x m)
Var transpose(Var m);

Var dot(Var a, Var b);
Var sum(Var a);
Var sum_squares(Var a);

Var tanh(Var a);
Var sigmoid(Var a);
Var softmax(Var logits);

Var concat(const std::vector<Var>& parts);
Var slice(Var a, std::size_t begin, std::size_t length);
Var row(Var matrix, std::size_t r);
Var pick(Var a, std::size_t i);

/// Binary cross-entropy of a probability node against a {0,1} label.
Var cross_entropy(Var p, int label);

struct LstmState {
    Var h;
    Var c;
};

LstmState lstm_cell(Var x, Var h, Var c, Var W, Var b);

}  // namespace akisub::numeric
