#include "akisub/model/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "akisub/error.hpp"

namespace akisub::model {

using nlohmann::json;

namespace {
constexpr const char* kMagic = "akisub-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "meta " << (ckpt.meta_json.empty() ? "{}" : ckpt.meta_json) << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
        const Tensor& t = ckpt.params.value(i);
        out << "tensor " << ckpt.params.name(i) << ' ' << t.rank();
        for (auto d : t.shape()) out << ' ' << d;
        out << '\n';
        for (std::size_t k = 0; k < t.size(); ++k) out << (k ? " " : "") << t[k];
        out << '\n';
    }
    if (!out) throw IoError("failed writing checkpoint");
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_checkpoint(ckpt, out);
}

Checkpoint read_checkpoint(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) throw ParseError("not an akisub checkpoint");
    if (version != kVersion) throw ParseError("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ckpt;
    std::string word;
    if (!(in >> word) || word != "meta") throw ParseError("checkpoint meta line missing");
    std::getline(in >> std::ws, ckpt.meta_json);
    while (in >> word) {
        if (word != "tensor") throw ParseError("expected 'tensor', found '" + word + "'");
        std::string name;
        std::size_t rank = 0;
        if (!(in >> name >> rank) || rank > 8) throw ParseError("bad tensor header");
        numeric::Shape shape(rank);
        for (auto& d : shape)
            if (!(in >> d)) throw ParseError("bad shape for tensor '" + name + "'");
        Tensor t(shape);
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (!(in >> t[k])) throw ParseError("truncated values for tensor '" + name + "'");
        }
        ckpt.params.add(name, std::move(t));
    }
    return ckpt;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_checkpoint(in);
}

std::string hyper_to_json(const HyperConfig& h) {
    json j{{"memory_size", h.memory_size}, {"emb_dim", h.emb_dim},         {"word_dim", h.word_dim},
           {"bottom_hidden", h.bottom_hidden}, {"top_hidden", h.top_hidden}, {"static_dim", h.static_dim},
           {"static_proj", h.static_proj}, {"hops", h.hops},                 {"batch_size", h.batch_size},
           {"learning_rate", h.learning_rate}, {"epochs", h.epochs},         {"seed", h.seed},
           {"init_scale", h.init_scale}};
    return j.dump();
}

HyperConfig hyper_from_json(const std::string& text) {
    HyperConfig h;
    try {
        json j = json::parse(text);
        h.memory_size = j.value("memory_size", h.memory_size);
        h.emb_dim = j.value("emb_dim", h.emb_dim);
        h.word_dim = j.value("word_dim", h.word_dim);
        h.bottom_hidden = j.value("bottom_hidden", h.bottom_hidden);
        h.top_hidden = j.value("top_hidden", h.top_hidden);
        h.static_dim = j.value("static_dim", h.static_dim);
        h.static_proj = j.value("static_proj", h.static_proj);
        h.hops = j.value("hops", h.hops);
        h.batch_size = j.value("batch_size", h.batch_size);
        h.learning_rate = j.value("learning_rate", h.learning_rate);
        h.epochs = j.value("epochs", h.epochs);
        h.seed = j.value("seed", h.seed);
        h.init_scale = j.value("init_scale", h.init_scale);
    } catch (const json::exception& e) {
        throw ParseError(std::string("hyperparameters: ") + e.what());
    }
    return h;
}

void save_memnet(const MemNet& model, const std::filesystem::path& path) {
    json meta{{"kind", "memnet"},
              {"hyper", json::parse(hyper_to_json(model.hyper))},
              {"vocab_size", model.vocab_size},
              {"n_vars", model.n_vars}};
    write_checkpoint(Checkpoint{meta.dump(), model.params}, path);
}

MemNet load_memnet(const std::filesystem::path& path) {
    Checkpoint c = read_checkpoint(path);
    MemNet m;
    try {
        json meta = json::parse(c.meta_json);
        if (meta.value("kind", "") != "memnet") throw ParseError("checkpoint is not a memory-network model");
        m.hyper = hyper_from_json(meta.at("hyper").dump());
        m.vocab_size = meta.at("vocab_size").get<std::size_t>();
        m.n_vars = meta.at("n_vars").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("checkpoint meta: ") + e.what());
    }
    // shapes must match a freshly initialised model
    MemNet ref = init_memnet(m.hyper, m.vocab_size, m.n_vars);
    for (std::size_t i = 0; i < ref.params.size(); ++i) {
        auto idx = c.params.find(ref.params.name(i));
        if (!idx) throw ParseError("checkpoint lacks tensor '" + ref.params.name(i) + "'");
        if (c.params.value(*idx).shape() != ref.params.value(i).shape()) {
            throw ParseError("tensor '" + ref.params.name(i) + "' has shape " + c.params.value(*idx).shape_string());
        }
        ref.params.value(i) = c.params.value(*idx);
    }
    m.params = std::move(ref.params);
    return m;
}

}  // namespace akisub::model
