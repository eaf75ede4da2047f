#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "akisub/numeric/tensor.hpp"

namespace akisub::numeric {

/// Named, ordered collection of trainable tensors. Index order is stable and
/// is the key under which gradients and optimizer state are stored.
class ParameterSet {
   public:
    std::size_t add(std::string name, Tensor init);

    std::size_t size() const { return values_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    Tensor& value(std::size_t i) { return values_[i]; }
    const Tensor& value(std::size_t i) const { return values_[i]; }
    Tensor& value(std::string_view name);
    const Tensor& value(std::string_view name) const;
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t index(std::string_view name) const;

    std::size_t scalar_count() const;
    std::uint64_t checksum() const;

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

   private:
    std::vector<std::string> names_;
    std::vector<Tensor> values_;
};

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
/// tape is alive.
class Var {
   public:
    Var() = default;
    const Tensor& value() const;
    std::size_t id() const { return id_; }
    Tape* tape() const { return tape_; }
    bool valid() const { return tape_ != nullptr; }

   private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Append-only record of primitive applications for reverse-mode
/// differentiation. Single owner; do not share while recording.
class Tape {
   public:
    using BackwardFn = std::function<void(Tape&, std::size_t self)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    Var leaf(Tensor value);
    /// One leaf per (set, index) per tape: every use of a parameter refers to
    /// the same node, so tied weights accumulate into a single gradient.
    Var parameter(const ParameterSet& params, std::size_t index);
    Var parameter(const ParameterSet& params, std::string_view name);

    /// Record an operation. The node requires a gradient iff any input does;
    /// `backward` is dropped otherwise.
    Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward);

    /// Reverse accumulation from a scalar node. Visits each node at most once,
    /// in reverse recording order.
    void backward(Var loss);

    const Tensor& value(std::size_t id) const { return nodes_[id].value; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_[id].inputs; }
    /// Gradient of the last backward() w.r.t. node `id` (zeros if unreached).
    Tensor grad(std::size_t id) const;
    Tensor grad(Var v) const { return grad(v.id()); }
    /// Mutable gradient buffer, allocated as zeros on first use.
    Tensor& grad_buffer(std::size_t id);

    std::vector<Tensor> parameter_gradients(const ParameterSet& params) const;
    std::optional<std::size_t> parameter_node(const ParameterSet& params, std::size_t index) const;

    std::size_t size() const { return nodes_.size(); }

   private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        bool requires_grad = false;
        bool has_grad = false;
    };

    std::deque<Node> nodes_;
    std::map<std::pair<const ParameterSet*, std::size_t>, std::size_t> param_nodes_;
    bool backward_done_ = false;
};

}  // namespace akisub::numeric
