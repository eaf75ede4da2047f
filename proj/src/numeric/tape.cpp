#include "akisub/numeric/tape.hpp"

#include "akisub/error.hpp"

namespace akisub::numeric {

std::size_t ParameterSet::add(std::string name, Tensor init) {
    if (find(name)) throw ArgumentError("duplicate parameter name '" + name + "'");
    names_.push_back(std::move(name));
    values_.push_back(std::move(init));
    return values_.size() - 1;
}

std::optional<std::size_t> ParameterSet::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t ParameterSet::index(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw ArgumentError("unknown parameter '" + std::string(name) + "'");
    return *idx;
}

Tensor& ParameterSet::value(std::string_view name) { return values_[index(name)]; }
const Tensor& ParameterSet::value(std::string_view name) const { return values_[index(name)]; }

std::size_t ParameterSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
}

std::uint64_t ParameterSet::checksum() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& v : values_) {
        h ^= numeric::checksum(v);
        h *= 1099511628211ULL;
    }
    return h;
}

const Tensor& Var::value() const { return tape_->value(id_); }

Var Tape::constant(Tensor value) {
    Node n;
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Tensor value) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = true;
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(const ParameterSet& params, std::size_t index) {
    auto key = std::make_pair(&params, index);
    if (auto it = param_nodes_.find(key); it != param_nodes_.end()) return Var(this, it->second);
    Var v = leaf(params.value(index));
    param_nodes_.emplace(key, v.id());
    return v;
}

Var Tape::parameter(const ParameterSet& params, std::string_view name) {
    return parameter(params, params.index(name));
}

Var Tape::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward) {
    Node n;
    n.value = std::move(value);
    for (std::size_t in : inputs) {
        if (in >= nodes_.size()) throw ArgumentError("operand recorded after its consumer");
        n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    }
    n.inputs = std::move(inputs);
    if (n.requires_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad_buffer(std::size_t id) {
    Node& n = nodes_[id];
    if (!n.has_grad) {
        n.grad = Tensor(n.value.shape());
        n.has_grad = true;
    }
    return n.grad;
}

Tensor Tape::grad(std::size_t id) const {
    const Node& n = nodes_[id];
    if (!n.has_grad) return Tensor(n.value.shape());
    return n.grad;
}

void Tape::backward(Var loss) {
    if (loss.tape() != this) throw ArgumentError("loss was not recorded on this tape");
    const Node& root = nodes_[loss.id()];
    if (root.value.size() != 1) {
        throw ArgumentError("backward requires a scalar loss, got shape " + root.value.shape_string());
    }
    if (backward_done_) {
        for (auto& n : nodes_) {
            n.has_grad = false;
            n.grad = Tensor();
        }
    }
    backward_done_ = true;
    grad_buffer(loss.id())[0] = 1.0;
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.has_grad || !n.backward) continue;
        n.backward(*this, i);
    }
}

std::vector<Tensor> Tape::parameter_gradients(const ParameterSet& params) const {
    std::vector<Tensor> grads;
    grads.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto node = parameter_node(params, i);
        grads.push_back(node ? grad(*node) : Tensor(params.value(i).shape()));
    }
    return grads;
}

std::optional<std::size_t> Tape::parameter_node(const ParameterSet& params, std::size_t index) const {
    auto it = param_nodes_.find(std::make_pair(&params, index));
    if (it == param_nodes_.end()) return std::nullopt;
    return it->second;
}

}  // namespace akisub::numeric
