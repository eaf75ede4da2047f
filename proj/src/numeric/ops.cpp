#include "akisub/numeric/ops.hpp"

#include <algorithm>
#include <cmath>

#include "akisub/error.hpp"

namespace akisub::numeric {

namespace {

double sigmoid_value(double z) {
    if (z >= 0) {
        double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
    if (a.rank() != rank) {
        throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                             ", got shape " + a.shape_string());
    }
}

Tape& same_tape(Var a, Var b) {
    if (a.tape() != b.tape() || a.tape() == nullptr) {
        throw ArgumentError("operands recorded on different tapes");
    }
    return *a.tape();
}

void accumulate(Tape& t, std::size_t id, std::span<const double> g, std::size_t offset = 0) {
    if (!t.requires_grad(id)) return;
    auto dst = t.grad_buffer(id).values();
    for (std::size_t i = 0; i < g.size(); ++i) dst[offset + i] += g[i];
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw ArgumentError("softmax of an empty vector");
    double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

double cross_entropy(double p, int label) {
    if (label != 0 && label != 1) {
        throw ArgumentError("cross_entropy label must be 0 or 1, got " + std::to_string(label));
    }
    double q = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    return label == 1 ? -std::log(q) : -std::log(1.0 - q);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul: inner extents disagree, " + a.shape_string() + " x " +
                             b.shape_string());
    }
    Tensor out(Shape{m, n});
    for (std::size_t i = 0; i < m; ++i) {
        double* orow = &out.values()[i * n];
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a.at(i, p);
            if (aip == 0.0) continue;
            const double* brow = &b.values()[p * n];
            for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
        }
    }
    return out;
}

LstmForward lstm_cell(std::span<const double> x, std::span<const double> h,
                      std::span<const double> c, const Tensor& W, const Tensor& b) {
    const std::size_t H = h.size();
    const std::size_t D = x.size();
    if (c.size() != H || W.rank() != 2 || W.rows() != 4 * H || W.cols() != D + H ||
        b.size() != 4 * H) {
        throw DimensionError("lstm_cell: x " + std::to_string(D) + ", h " + std::to_string(H) +
                             ", c " + std::to_string(c.size()) + ", W " + W.shape_string() +
                             ", b " + b.shape_string());
    }
    LstmForward f;
    f.gates.assign(b.values().begin(), b.values().end());
    const double* w = W.values().data();
    const std::size_t stride = D + H;
    for (std::size_t r = 0; r < 4 * H; ++r) {
        const double* wr = w + r * stride;
        double acc = 0.0;
        for (std::size_t j = 0; j < D; ++j) acc += wr[j] * x[j];
        for (std::size_t j = 0; j < H; ++j) acc += wr[D + j] * h[j];
        f.gates[r] += acc;
    }
    f.h.resize(H);
    f.c.resize(H);
    f.tanh_c.resize(H);
    for (std::size_t j = 0; j < H; ++j) {
        double& gi = f.gates[j];
        double& gf = f.gates[H + j];
        double& gg = f.gates[2 * H + j];
        double& go = f.gates[3 * H + j];
        gi = sigmoid_value(gi);
        gf = sigmoid_value(gf);
        gg = std::tanh(gg);
        go = sigmoid_value(go);
        f.c[j] = gf * c[j] + gi * gg;
        f.tanh_c[j] = std::tanh(f.c[j]);
        f.h[j] = go * f.tanh_c[j];
    }
    return f;
}

Var add(Var a, Var b) {
    Tape& t = same_tape(a, b);
    require_same_shape(a.value(), b.value(), "add");
    Tensor out = a.value();
    auto bv = b.value().values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    const std::size_t ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        accumulate(tp, ia, g);
        accumulate(tp, ib, g);
    });
}

Var sub(Var a, Var b) {
    Tape& t = same_tape(a, b);
    require_same_shape(a.value(), b.value(), "sub");
    Tensor out = a.value();
    auto bv = b.value().values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    const std::size_t ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        accumulate(tp, ia, g);
        if (tp.requires_grad(ib)) {
            auto dst = tp.grad_buffer(ib).values();
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] -= g[i];
        }
    });
}

Var mul(Var a, Var b) {
    Tape& t = same_tape(a, b);
    require_same_shape(a.value(), b.value(), "mul");
    Tensor out = a.value();
    auto bv = b.value().values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    const std::size_t ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        auto av = tp.value(ia).values();
        auto bv2 = tp.value(ib).values();
        if (tp.requires_grad(ia)) {
            auto dst = tp.grad_buffer(ia).values();
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * bv2[i];
        }
        if (tp.requires_grad(ib)) {
            auto dst = tp.grad_buffer(ib).values();
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * av[i];
        }
    });
}

Var scale(Var a, double factor) {
    Tape& t = *a.tape();
    Tensor out = a.value();
    for (double& v : out.values()) v *= factor;
    const std::size_t ia = a.id();
    return t.record(std::move(out), {ia}, [ia, factor](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        auto dst = tp.grad_buffer(ia).values();
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += factor * g[i];
    });
}

Var add_n(const std::vector<Var>& terms) {
    if (terms.empty()) throw ArgumentError("add_n of no terms");
    Tape& t = *terms.front().tape();
    Tensor out = terms.front().value();
    std::vector<std::size_t> ids;
    ids.reserve(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
        same_tape(terms.front(), terms[k]);
        if (k > 0) {
            require_same_shape(out, terms[k].value(), "add_n");
            auto v = terms[k].value().values();
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
        }
        ids.push_back(terms[k].id());
    }
    auto captured = ids;
    return t.record(std::move(out), std::move(ids), [captured](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        for (std::size_t id : captured) accumulate(tp, id, g);
    });
}

Var matmul(Var a, Var b) {
    Tape& t = same_tape(a, b);
    Tensor out = matmul(a.value(), b.value());
    const std::size_t ia = a.id(), ib = b.id();
    return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        const Tensor& g = tp.grad_buffer(self);
        const Tensor& av = tp.value(ia);
        const Tensor& bv = tp.value(ib);
        const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
        if (tp.requires_grad(ia)) {
            Tensor& ga = tp.grad_buffer(ia);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += g.at(i, j) * bv.at(p, j);
                    ga.at(i, p) += acc;
                }
        }
        if (tp.requires_grad(ib)) {
            Tensor& gb = tp.grad_buffer(ib);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    const double aip = av.at(i, p);
                    for (std::size_t j = 0; j < n; ++j) gb.at(p, j) += aip * g.at(i, j);
                }
        }
    });
}

Var matvec(Var m, Var x) {
    Tape& t = same_tape(m, x);
    const Tensor& M = m.value();
    const Tensor& X = x.value();
    require_rank(M, 2, "matvec");
    require_rank(X, 1, "matvec");
    const std::size_t rows = M.rows(), cols = M.cols();
    if (X.size() != cols) {
        throw DimensionError("matvec: " + M.shape_string() + " x " + X.shape_string());
    }
    Tensor out(Shape{rows});
    for (std::size_t r = 0; r < rows; ++r) {
        const double* mr = &M.values()[r * cols];
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += mr[c] * X[c];
        out[r] = acc;
    }
    const std::size_t im = m.id(), ix = x.id();
    return t.record(std::move(out), {im, ix}, [im, ix](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        const Tensor& Mv = tp.value(im);
        const Tensor& Xv = tp.value(ix);
        const std::size_t rows2 = Mv.rows(), cols2 = Mv.cols();
        if (tp.requires_grad(im)) {
            auto gm = tp.grad_buffer(im).values();
            for (std::size_t r = 0; r < rows2; ++r) {
                const double gr = g[r];
                if (gr == 0.0) continue;
                double* dst = &gm[r * cols2];
                for (std::size_t c = 0; c < cols2; ++c) dst[c] += gr * Xv[c];
            }
        }
        if (tp.requires_grad(ix)) {
            auto gx = tp.grad_buffer(ix).values();
            for (std::size_t r = 0; r < rows2; ++r) {
                const double gr = g[r];
                if (gr == 0.0) continue;
                const double* mr = &Mv.values()[r * cols2];
                for (std::size_t c = 0; c < cols2; ++c) gx[c] += gr * mr[c];
            }
        }
    });
}

Var vecmat(Var x, Var m) {
    Tape& t = same_tape(x, m);
    const Tensor& M = m.value();
    const Tensor& X = x.value();
    require_rank(M, 2, "vecmat");
    require_rank(X, 1, "vecmat");
    const std::size_t rows = M.rows(), cols = M.cols();
    if (X.size() != rows) {
        throw DimensionError("vecmat: " + X.shape_string() + " x " + M.shape_string());
    }
    Tensor out(Shape{cols});
    for (std::size_t r = 0; r < rows; ++r) {
        const double xr = X[r];
        const double* mr = &M.values()[r * cols];
        for (std::size_t c = 0; c < cols; ++c) out[c] += xr * mr[c];
    }
    const std::size_t ix = x.id(), im = m.id();
    return t.record(std::move(out), {ix, im}, [ix, im](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        const Tensor& Mv = tp.value(im);
        const Tensor& Xv = tp.value(ix);
        const std::size_t rows2 = Mv.rows(), cols2 = Mv.cols();
        if (tp.requires_grad(ix)) {
            auto gx = tp.grad_buffer(ix).values();
            for (std::size_t r = 0; r < rows2; ++r) {
                const double* mr = &Mv.values()[r * cols2];
                double acc = 0.0;
                for (std::size_t c = 0; c < cols2; ++c) acc += mr[c] * g[c];
                gx[r] += acc;
            }
        }
        if (tp.requires_grad(im)) {
            auto gm = tp.grad_buffer(im).values();
            for (std::size_t r = 0; r < rows2; ++r) {
                const double xr = Xv[r];
                double* dst = &gm[r * cols2];
                for (std::size_t c = 0; c < cols2; ++c) dst[c] += xr * g[c];
            }
        }
    });
}

Var transpose(Var m) {
    Tape& t = *m.tape();
    const Tensor& M = m.value();
    require_rank(M, 2, "transpose");
    const std::size_t rows = M.rows(), cols = M.cols();
    Tensor out(Shape{cols, rows});
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) out.at(c, r) = M.at(r, c);
    const std::size_t im = m.id();
    return t.record(std::move(out), {im}, [im, rows, cols](Tape& tp, std::size_t self) {
        const Tensor& g = tp.grad_buffer(self);
        Tensor& gm = tp.grad_buffer(im);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) gm.at(r, c) += g.at(c, r);
    });
}

Var dot(Var a, Var b) {
    Tape& t = same_tape(a, b);
    require_same_shape(a.value(), b.value(), "dot");
    double acc = 0.0;
    auto av = a.value().values();
    auto bv = b.value().values();
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
    const std::size_t ia = a.id(), ib = b.id();
    return t.record(Tensor::scalar(acc), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        const double g = tp.grad_buffer(self)[0];
        auto av2 = tp.value(ia).values();
        auto bv2 = tp.value(ib).values();
        if (tp.requires_grad(ia)) {
            auto dst = tp.grad_buffer(ia).values();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g * bv2[i];
        }
        if (tp.requires_grad(ib)) {
            auto dst = tp.grad_buffer(ib).values();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g * av2[i];
        }
    });
}

Var sum(Var a) {
    Tape& t = *a.tape();
    double acc = 0.0;
    for (double v : a.value().values()) acc += v;
    const std::size_t ia = a.id();
    return t.record(Tensor::scalar(acc), {ia}, [ia](Tape& tp, std::size_t self) {
        const double g = tp.grad_buffer(self)[0];
        for (double& d : tp.grad_buffer(ia).values()) d += g;
    });
}

Var sum_squares(Var a) {
    Tape& t = *a.tape();
    double acc = 0.0;
    for (double v : a.value().values()) acc += v * v;
    const std::size_t ia = a.id();
    return t.record(Tensor::scalar(acc), {ia}, [ia](Tape& tp, std::size_t self) {
        const double g = tp.grad_buffer(self)[0];
        auto av = tp.value(ia).values();
        auto dst = tp.grad_buffer(ia).values();
        for (std::size_t i = 0; i < av.size(); ++i) dst[i] += 2.0 * g * av[i];
    });
}

Var tanh(Var a) {
    Tape& t = *a.tape();
    Tensor out = a.value();
    for (double& v : out.values()) v = std::tanh(v);
    const std::size_t ia = a.id();
    return t.record(std::move(out), {ia}, [ia](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        auto y = tp.value(self).values();
        auto dst = tp.grad_buffer(ia).values();
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * (1.0 - y[i] * y[i]);
    });
}

Var sigmoid(Var a) {
    Tape& t = *a.tape();
    Tensor out = a.value();
    for (double& v : out.values()) v = sigmoid_value(v);
    const std::size_t ia = a.id();
    return t.record(std::move(out), {ia}, [ia](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        auto y = tp.value(self).values();
        auto dst = tp.grad_buffer(ia).values();
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i] * y[i] * (1.0 - y[i]);
    });
}

Var softmax(Var logits) {
    Tape& t = *logits.tape();
    require_rank(logits.value(), 1, "softmax");
    auto probs = softmax(logits.value().values());
    const std::size_t ia = logits.id();
    return t.record(Tensor::vector(std::move(probs)), {ia}, [ia](Tape& tp, std::size_t self) {
        auto g = tp.grad_buffer(self).values();
        auto y = tp.value(self).values();
        double inner = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) inner += g[i] * y[i];
        auto dst = tp.grad_buffer(ia).values();
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += y[i] * (g[i] - inner);
    });
}

Var concat(const std::vector<Var>& parts) {
    if (parts.empty()) throw ArgumentError("concat of no parts");
    Tape& t = *parts.front().tape();
    std::vector<double> out;
    std::vector<std::size_t> ids, offsets;
    for (const Var& p : parts) {
        same_tape(parts.front(), p);
        require_rank(p.value(), 1, "concat");
        offsets.push_back(out.size());
        ids.push_back(p.id());
        auto v = p.value().values();
        out.insert(out.end(), v.begin(), v.end());
    }
    auto captured_ids = ids;
    return t.record(Tensor::vector(std::move(out)), std::move(ids),
                    [captured_ids, offsets](Tape& tp, std::size_t self) {
                        auto g = tp.grad_buffer(self).values();
                        for (std::size_t k = 0; k < captured_ids.size(); ++k) {
                            const std::size_t id = captured_ids[k];
                            if (!tp.requires_grad(id)) continue;
                            auto dst = tp.grad_buffer(id).values();
                            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[offsets[k] + i];
                        }
                    });
}

Var slice(Var a, std::size_t begin, std::size_t length) {
    Tape& t = *a.tape();
    require_rank(a.value(), 1, "slice");
    if (begin + length > a.value().size()) {
        throw DimensionError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + length) +
                             ") out of range for " + a.value().shape_string());
    }
    auto v = a.value().values().subspan(begin, length);
    const std::size_t ia = a.id();
    return t.record(Tensor::vector(std::vector<double>(v.begin(), v.end())), {ia},
                    [ia, begin](Tape& tp, std::size_t self) {
                        accumulate(tp, ia, tp.grad_buffer(self).values(), begin);
                    });
}

Var row(Var matrix, std::size_t r) {
    Tape& t = *matrix.tape();
    require_rank(matrix.value(), 2, "row");
    if (r >= matrix.value().rows()) {
        throw DimensionError("row " + std::to_string(r) + " out of range for " +
                             matrix.value().shape_string());
    }
    auto v = matrix.value().row(r);
    const std::size_t cols = matrix.value().cols();
    const std::size_t ia = matrix.id();
    return t.record(Tensor::vector(std::vector<double>(v.begin(), v.end())), {ia},
                    [ia, r, cols](Tape& tp, std::size_t self) {
                        accumulate(tp, ia, tp.grad_buffer(self).values(), r * cols);
                    });
}

Var pick(Var a, std::size_t i) {
    Tape& t = *a.tape();
    if (i >= a.value().size()) throw DimensionError("pick index out of range");
    const std::size_t ia = a.id();
    return t.record(Tensor::scalar(a.value()[i]), {ia}, [ia, i](Tape& tp, std::size_t self) {
        tp.grad_buffer(ia)[i] += tp.grad_buffer(self)[0];
    });
}

Var cross_entropy(Var p, int label) {
    Tape& t = *p.tape();
    const double pv = p.value().item();
    const double loss = cross_entropy(pv, label);
    const std::size_t ip = p.id();
    return t.record(Tensor::scalar(loss), {ip}, [ip, label](Tape& tp, std::size_t self) {
        const double g = tp.grad_buffer(self)[0];
        const double raw = tp.value(ip)[0];
        // clamped region has zero derivative
        if (raw < kProbabilityEpsilon || raw > 1.0 - kProbabilityEpsilon) return;
        const double d = label == 1 ? -1.0 / raw : 1.0 / (1.0 - raw);
        tp.grad_buffer(ip)[0] += g * d;
    });
}

LstmState lstm_cell(Var x, Var h, Var c, Var W, Var b) {
    Tape& t = same_tape(x, h);
    same_tape(x, c);
    same_tape(x, W);
    same_tape(x, b);
    LstmForward f = lstm_cell(x.value().values(), h.value().values(), c.value().values(), W.value(),
                              b.value());
    const std::size_t H = f.h.size();
    std::vector<double> packed(f.h);
    packed.insert(packed.end(), f.c.begin(), f.c.end());
    const std::size_t ix = x.id(), ih = h.id(), ic = c.id(), iw = W.id(), ib = b.id();
    Var state = t.record(
        Tensor::vector(std::move(packed)), {ix, ih, ic, iw, ib},
        [ix, ih, ic, iw, ib, H, gates = std::move(f.gates), tanh_c = std::move(f.tanh_c)](
            Tape& tp, std::size_t self) {
            auto g = tp.grad_buffer(self).values();
            auto xv = tp.value(ix).values();
            auto hv = tp.value(ih).values();
            auto cv = tp.value(ic).values();
            const Tensor& Wv = tp.value(iw);
            const std::size_t D = xv.size();
            const std::size_t stride = D + H;
            std::vector<double> dz(4 * H);
            std::vector<double> dc_prev(H);
            for (std::size_t j = 0; j < H; ++j) {
                const double gi = gates[j], gf = gates[H + j], gg = gates[2 * H + j],
                             go = gates[3 * H + j];
                const double dh = g[j];
                const double dc = g[H + j] + dh * go * (1.0 - tanh_c[j] * tanh_c[j]);
                dz[j] = dc * gg * gi * (1.0 - gi);
                dz[H + j] = dc * cv[j] * gf * (1.0 - gf);
                dz[2 * H + j] = dc * gi * (1.0 - gg * gg);
                dz[3 * H + j] = dh * tanh_c[j] * go * (1.0 - go);
                dc_prev[j] = dc * gf;
            }
            if (tp.requires_grad(ic)) accumulate(tp, ic, dc_prev);
            if (tp.requires_grad(ib)) accumulate(tp, ib, dz);
            if (tp.requires_grad(iw)) {
                auto gw = tp.grad_buffer(iw).values();
                for (std::size_t r = 0; r < 4 * H; ++r) {
                    const double d = dz[r];
                    if (d == 0.0) continue;
                    double* dst = &gw[r * stride];
                    for (std::size_t k = 0; k < D; ++k) dst[k] += d * xv[k];
                    for (std::size_t k = 0; k < H; ++k) dst[D + k] += d * hv[k];
                }
            }
            const bool need_x = tp.requires_grad(ix), need_h = tp.requires_grad(ih);
            if (need_x || need_h) {
                std::vector<double> dxh(stride, 0.0);
                const double* w = Wv.values().data();
                for (std::size_t r = 0; r < 4 * H; ++r) {
                    const double d = dz[r];
                    if (d == 0.0) continue;
                    const double* wr = w + r * stride;
                    for (std::size_t k = 0; k < stride; ++k) dxh[k] += d * wr[k];
                }
                if (need_x) accumulate(tp, ix, std::span<const double>(dxh).subspan(0, D));
                if (need_h) accumulate(tp, ih, std::span<const double>(dxh).subspan(D, H));
            }
        });
    return LstmState{slice(state, 0, H), slice(state, H, H)};
}

}  // namespace akisub::numeric
