#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "akisub/error.hpp"
#include "akisub/model/checkpoint.hpp"
#include "akisub/model/hielstm.hpp"
#include "akisub/model/memnet.hpp"
#include "akisub/numeric/ops.hpp"
#include "oracles.hpp"

using namespace akisub;
using namespace akisub::model;
using numeric::Rng;

namespace {

constexpr std::size_t kVars = 5;
constexpr std::size_t kVocab = 8;

HyperConfig tiny(std::size_t memory = 3) {
    HyperConfig h;
    h.memory_size = memory;
    h.emb_dim = h.top_hidden = 4;
    h.word_dim = 3;
    h.bottom_hidden = 4;
    h.static_proj = 2;
    h.batch_size = 2;
    h.epochs = 1;
    h.seed = 5;
    return h;
}

StayInput random_input(const HyperConfig& h, Rng& rng, std::string id = "s") {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StayInput in;
    in.stay_id = std::move(id);
    in.sequence = numeric::uniform_tensor({h.memory_size, kVars}, 0.0, 1.0, rng);
    in.static_features.resize(h.static_dim);
    for (double& v : in.static_features) v = u(rng) < 0.3 ? 1.0 : 0.0;
    const int notes = 1 + int(u(rng) * 3);
    for (int n = 0; n < notes; ++n) {
        std::vector<int> seq;
        const int len = 1 + int(u(rng) * 4);
        for (int k = 0; k < len; ++k) seq.push_back(2 + int(u(rng) * (kVocab - 2)));
        in.notes.push_back(seq);
    }
    return in;
}

std::vector<double> row_of(const Tensor& m, std::size_t r) {
    return {m.row(r).begin(), m.row(r).end()};
}

std::vector<double> matvec(const Tensor& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) y[i] += m.at(i, j) * x[j];
    return y;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("encode_notes structure") {
    const auto h = tiny();
    auto model = init_memnet(h, kVocab, kVars);
    const auto& p = model.params;

    // one note with one token: one bottom step, then one top step
    const NoteSequences one{{3}};
    const auto x = row_of(p.value("word_emb"), 3);
    const auto bottom = numeric::lstm_cell(x, std::vector<double>(h.bottom_hidden), std::vector<double>(h.bottom_hidden),
                                           p.value("bottom_W"), p.value("bottom_b"));
    const auto top = numeric::lstm_cell(bottom.h, std::vector<double>(h.top_hidden), std::vector<double>(h.top_hidden),
                                        p.value("top_W"), p.value("top_b"));
    CHECK(max_abs_diff(encode_notes(one, p).values(), top.h) < 1e-15);

    const NoteSequences ab{{2, 3, 4}, {5, 6}}, ba{{5, 6}, {2, 3, 4}};
    CHECK(max_abs_diff(encode_notes(ab, p).values(), encode_notes(ba, p).values()) > 1e-6);

    auto zero = model;
    for (std::size_t i = 0; i < zero.params.size(); ++i) zero.params.value(i).fill(0.0);
    const Tensor u0 = encode_notes(ab, zero.params);
    for (double v : u0.values()) CHECK(v == 0.0);
}

TEST_CASE("memory_read examples") {
    const auto h = tiny(4);
    Rng rng(1);
    auto model = init_memnet(h, kVocab, kVars);
    const Tensor u = numeric::uniform_tensor({h.emb_dim}, -1.0, 1.0, rng);

    Tensor same(numeric::Shape{4, kVars});
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t v = 0; v < kVars; ++v) same.at(j, v) = 0.1 * double(v + 1);
    auto m = memory_read(u, same, model.params, 4);
    for (double a : m.alpha) CHECK(a == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(max_abs_diff(m.o.values(), m.E.row(0)) < 1e-14);

    const Tensor single = numeric::uniform_tensor({1, kVars}, 0.0, 1.0, rng);
    auto m1 = memory_read(u, single, model.params, 1);
    CHECK(m1.alpha.size() == 1);
    CHECK(m1.alpha[0] == 1.0);
    CHECK(max_abs_diff(m1.o.values(), m1.E.row(0)) < 1e-15);

    // temperature limit: large c concentrates on argmax u . z_j
    const Tensor seq = numeric::uniform_tensor({4, kVars}, 0.0, 1.0, rng);
    const auto base = memory_read(u, seq, model.params, 4);
    std::vector<double> scores(4);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < h.emb_dim; ++k) scores[j] += u[k] * base.Z.at(j, k);
    const auto best = std::size_t(std::max_element(scores.begin(), scores.end()) - scores.begin());
    Tensor big = u;
    for (double& v : big.storage()) v *= 1e6;
    CHECK(memory_read(big, seq, model.params, 4).alpha[best] > 0.999);

    CHECK_THROWS_AS(memory_read(u, seq, model.params, 3), DimensionError);
}

TEST_CASE("attention is a probability vector whose argmax ignores query scale") {
    const auto h = tiny(6);
    Rng rng(2);
    auto model = init_memnet(h, kVocab, kVars);
    for (int rep = 0; rep < 50; ++rep) {
        const Tensor u = numeric::uniform_tensor({h.emb_dim}, -3.0, 3.0, rng);
        const Tensor seq = numeric::uniform_tensor({6, kVars}, 0.0, 1.0, rng);
        const auto m = memory_read(u, seq, model.params, 6);
        double s = 0.0;
        for (double a : m.alpha) {
            CHECK(a >= 0.0);
            s += a;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
        Tensor scaled = u;
        for (double& v : scaled.storage()) v *= 7.5;
        const auto m2 = memory_read(scaled, seq, model.params, 6);
        CHECK(std::max_element(m.alpha.begin(), m.alpha.end()) - m.alpha.begin() ==
              std::max_element(m2.alpha.begin(), m2.alpha.end()) - m2.alpha.begin());
    }
}

TEST_CASE("multi_hop examples") {
    const auto h = tiny(3);
    Rng rng(3);
    auto model = init_memnet(h, kVocab, kVars);
    const Tensor u = numeric::uniform_tensor({h.emb_dim}, -1.0, 1.0, rng);
    const Tensor seq = numeric::uniform_tensor({3, kVars}, 0.0, 1.0, rng);
    const Tensor& H = model.params.value("H");

    const auto r1 = multi_hop(u, seq, model.params, 1, 3);
    const auto m = memory_read(u, seq, model.params, 3);
    auto expect = matvec(H, {u.values().begin(), u.values().end()});
    for (std::size_t i = 0; i < expect.size(); ++i) expect[i] += m.o[i];
    CHECK(max_abs_diff(r1.u.values(), expect) < 1e-15);

    // two hops unrolled by hand
    const Tensor u1 = Tensor::vector(expect);
    const auto m2 = memory_read(u1, seq, model.params, 3);
    auto expect2 = matvec(H, expect);
    for (std::size_t i = 0; i < expect2.size(); ++i) expect2[i] += m2.o[i];
    CHECK(max_abs_diff(multi_hop(u, seq, model.params, 2, 3).u.values(), expect2) < 1e-15);

    // H = I and B = 0 make u a fixed point
    auto fixed = model;
    auto& Hf = fixed.params.value("H");
    Hf.fill(0.0);
    for (std::size_t i = 0; i < h.emb_dim; ++i) Hf.at(i, i) = 1.0;
    fixed.params.value("B").fill(0.0);
    for (std::size_t hops : {1, 2, 5}) CHECK(multi_hop(u, seq, fixed.params, hops, 3).u == u);
}

TEST_CASE("A and B are shared across hops") {
    auto h = tiny();
    h.hops = 1;
    const auto one = init_memnet(h, kVocab, kVars);
    h.hops = 3;
    const auto three = init_memnet(h, kVocab, kVars);
    REQUIRE(one.params.size() == three.params.size());
    for (std::size_t i = 0; i < one.params.size(); ++i) CHECK(one.params.name(i) == three.params.name(i));
    CHECK(one.params.find("A").has_value());
    CHECK(one.params.find("B").has_value());
    CHECK(one.params.scalar_count() == three.params.scalar_count());
}

TEST_CASE("fuse examples") {
    HyperConfig full;
    CHECK(full.repr_dim() == 144);
    auto h = tiny();
    Rng rng(4);
    auto model = init_memnet(h, kVocab, kVars);
    const Tensor u = numeric::uniform_tensor({h.emb_dim}, -1.0, 1.0, rng);
    const Tensor o = numeric::uniform_tensor({h.emb_dim}, -1.0, 1.0, rng);
    const auto v0 = fuse(u, o, std::vector<double>(h.static_dim, 0.0), model.params);
    REQUIRE(v0.size() == h.repr_dim());
    for (std::size_t i = 0; i < h.emb_dim; ++i) CHECK(v0[i] == u[i] + o[i]);
    for (std::size_t i = h.emb_dim; i < v0.size(); ++i) CHECK(v0[i] == 0.0);

    std::vector<double> s(h.static_dim, 0.0);
    s[7] = 1.0;
    const auto v1 = fuse(u, o, s, model.params);
    const Tensor& Ws = model.params.value("Ws");
    for (std::size_t i = 0; i < h.emb_dim; ++i) CHECK(v1[i] == v0[i]);
    for (std::size_t i = 0; i < h.static_proj; ++i) CHECK(v1[h.emb_dim + i] == doctest::Approx(Ws.at(i, 7)));
}

TEST_CASE("predict examples") {
    Rng rng(6);
    const Tensor v = numeric::uniform_tensor({6}, -2.0, 2.0, rng);
    auto p = predict(v, Tensor(numeric::Shape{2, 6}));
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
    Tensor w = numeric::uniform_tensor({2, 6}, -1.0, 1.0, rng);
    for (std::size_t j = 0; j < 6; ++j) w.at(1, j) = w.at(0, j);
    p = predict(v, w);
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
    w = numeric::uniform_tensor({2, 6}, -1.0, 1.0, rng);
    double d0 = 0, d1 = 0;
    for (std::size_t j = 0; j < 6; ++j) {
        d0 += w.at(0, j) * v[j];
        d1 += w.at(1, j) * v[j];
    }
    p = predict(v, w);
    CHECK(p[1] == doctest::Approx(1.0 / (1.0 + std::exp(d0 - d1))).epsilon(1e-14));
}

TEST_CASE("memory network gradients match finite differences") {
    for (std::size_t hops : {1, 2, 3}) {
        auto h = tiny();
        h.hops = hops;
        Rng rng(10 + hops);
        auto model = init_memnet(h, kVocab, kVars);
        std::vector<StayInput> batch;
        for (int i = 0; i < 4; ++i) batch.push_back(random_input(h, rng));
        const std::vector<int> labels{1, 0, 0, 1};
        numeric::Tape tape;
        tape.backward(total_loss(tape, model, batch, labels));
        const auto grads = tape.parameter_gradients(model.params);
        const auto check = oracle::check_gradients(model.params, grads, [&]() {
            numeric::Tape t;
            return total_loss(t, model, batch, labels).value().item();
        });
        CAPTURE(hops);
        CAPTURE(check.worst);
        CHECK(check.max_rel_error < 1e-4);
    }
}

TEST_CASE("training") {
    auto h = tiny();
    Rng rng(7);
    std::vector<StayInput> two{random_input(h, rng, "a"), random_input(h, rng, "b")};
    two[0].sequence.fill(0.9);
    two[1].sequence.fill(0.1);
    const std::vector<int> labels{1, 0};

    SUBCASE("separable toy set converges") {
        h.epochs = 50;
        h.learning_rate = 0.05;
        const auto fit = train(two, labels, h, kVocab);
        REQUIRE(fit.loss_history.size() == 50);
        CHECK(fit.loss_history.back() < 0.1);
    }
    SUBCASE("zero epochs returns the initialisation") {
        h.epochs = 0;
        const auto fit = train(two, labels, h, kVocab);
        CHECK(fit.model.params == init_memnet(h, kVocab, kVars).params);
        CHECK(fit.loss_history.empty());
    }
    SUBCASE("fixed seed is bit-reproducible") {
        h.epochs = 5;
        const auto a = train(two, labels, h, kVocab);
        const auto b = train(two, labels, h, kVocab);
        CHECK(a.loss_history == b.loss_history);
        CHECK(a.model.params == b.model.params);
    }
    SUBCASE("single class is rejected") {
        CHECK_THROWS_AS(train(two, {1, 1}, h, kVocab), TrainingError);
    }
}

TEST_CASE("embed_stays") {
    auto small = tiny();
    small.emb_dim = small.top_hidden = 128;
    small.static_proj = 16;
    Rng rng(8);
    auto model = init_memnet(small, kVocab, kVars);
    const auto a = random_input(small, rng, "a");
    const auto b = random_input(small, rng, "b");
    const auto before = model.params.checksum();
    const Tensor e = embed_stays(model, {a, b, a});
    CHECK(e.rows() == 3);
    CHECK(e.cols() == 144);
    for (std::size_t j = 0; j < e.cols(); ++j) CHECK(e.at(0, j) == e.at(2, j));
    CHECK(model.params.checksum() == before);
    for (double p : predict_proba(model, {a, b})) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
}

TEST_CASE("hyper validation") {
    auto h = tiny();
    h.top_hidden = 5;
    CHECK_THROWS_AS(validate(h), ConfigError);
    h = tiny();
    h.hops = 0;
    CHECK_THROWS_AS(validate(h), ConfigError);
}

TEST_CASE("checkpoint round trip") {
    const auto h = tiny();
    const auto model = init_memnet(h, kVocab, kVars);
    const auto path = std::filesystem::temp_directory_path() / "akisub_test_memnet.ckpt";
    save_memnet(model, path);
    const auto back = load_memnet(path);
    CHECK(back.hyper == model.hyper);
    CHECK(back.params == model.params);
    CHECK(back.vocab_size == kVocab);
    std::filesystem::remove(path);
    std::istringstream truncated("akisub-checkpoint 1\nmeta {}\ntensor A 2 3\n");
    CHECK_THROWS_AS(read_checkpoint(truncated), ParseError);
}
