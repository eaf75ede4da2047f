#include "akisub/clustering/autoencoder.hpp"

#include "akisub/error.hpp"
#include "akisub/model/trainer.hpp"
#include "akisub/numeric/ops.hpp"

namespace akisub::clustering {

namespace ops = numeric;
using numeric::Tape;
using numeric::Var;

namespace {

Var layer(Tape& tape, const Autoencoder& ae, const char* w, const char* b, Var x, bool activate) {
    Var y = ops::add(ops::matvec(tape.parameter(ae.params, w), x), tape.parameter(ae.params, b));
    return activate && ae.config.activation == Activation::tanh ? ops::tanh(y) : y;
}

Var encode_row(Tape& tape, const Autoencoder& ae, Var x) {
    return layer(tape, ae, "enc2_W", "enc2_b", layer(tape, ae, "enc1_W", "enc1_b", x, true), false);
}

Var decode_row(Tape& tape, const Autoencoder& ae, Var code) {
    return layer(tape, ae, "dec2_W", "dec2_b", layer(tape, ae, "dec1_W", "dec1_b", code, true), false);
}

void check_input(const Tensor& x) {
    if (x.rank() != 2 || x.rows() < 2 || x.cols() < 2) {
        throw ArgumentError("autoencoder needs an n x d matrix with n, d >= 2");
    }
}

}  // namespace

Autoencoder init_autoencoder(std::size_t input_dim, const AutoencoderConfig& c) {
    if (input_dim == 0 || c.hidden == 0 || c.bottleneck == 0) throw ConfigError("autoencoder sizes must be positive");
    Autoencoder ae{c, input_dim, {}};
    numeric::Rng rng(c.seed);
    const double a = c.init_scale;
    ae.params.add("enc1_W", numeric::uniform_tensor({c.hidden, input_dim}, -a, a, rng));
    ae.params.add("enc1_b", Tensor({c.hidden}));
    ae.params.add("enc2_W", numeric::uniform_tensor({c.bottleneck, c.hidden}, -a, a, rng));
    ae.params.add("enc2_b", Tensor({c.bottleneck}));
    ae.params.add("dec1_W", numeric::uniform_tensor({c.hidden, c.bottleneck}, -a, a, rng));
    ae.params.add("dec1_b", Tensor({c.hidden}));
    ae.params.add("dec2_W", numeric::uniform_tensor({input_dim, c.hidden}, -a, a, rng));
    ae.params.add("dec2_b", Tensor({input_dim}));
    return ae;
}

Var reconstruction_loss(Tape& tape, const Autoencoder& ae, std::span<const double> row) {
    if (row.size() != ae.input_dim) throw DimensionError("row width does not match the autoencoder input");
    Var x = tape.constant(Tensor::vector(std::vector<double>(row.begin(), row.end())));
    return ops::sum_squares(ops::sub(decode_row(tape, ae, encode_row(tape, ae, x)), x));
}

AutoencoderFit train_autoencoder(const Tensor& x, const AutoencoderConfig& config) {
    check_input(x);
    AutoencoderFit fit{init_autoencoder(x.cols(), config), {}};
    Autoencoder& ae = fit.model;
    fit.loss_history = model::train_minibatch(
        ae.params, x.rows(), {config.batch_size, config.learning_rate, config.epochs, config.seed},
        [&](Tape& tape, std::size_t i) { return reconstruction_loss(tape, ae, x.row(i)); });
    return fit;
}

Tensor encode(const Autoencoder& ae, const Tensor& x) {
    Tensor out({x.rows(), ae.config.bottleneck});
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Tape tape;
        auto r = x.row(i);
        Var code = encode_row(tape, ae, tape.constant(Tensor::vector(std::vector<double>(r.begin(), r.end()))));
        for (std::size_t k = 0; k < ae.config.bottleneck; ++k) out.at(i, k) = code.value()[k];
    }
    return out;
}

double reconstruction_error(const Autoencoder& ae, const Tensor& x) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        Tape tape;
        total += reconstruction_loss(tape, ae, x.row(i)).value().item();
    }
    return total / double(x.rows());
}

Tensor autoencoder_embed(const Tensor& x, const AutoencoderConfig& config) {
    return encode(train_autoencoder(x, config).model, x);
}

}  // namespace akisub::clustering
