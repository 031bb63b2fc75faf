// SPDX-License-Identifier: Apache-2.0

#include "voxforge/autodiff/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "voxforge/error.hpp"

namespace voxforge::ad {

std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    auto node = std::make_shared<Node>();
    node->data.assign(shape_numel(shape), value);
    node->shape = std::move(shape);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
    if (shape_numel(shape) != data.size()) {
        throw ShapeError("tensor data has " + std::to_string(data.size()) + " values, shape " + shape_str(shape) +
                         " needs " + std::to_string(shape_numel(shape)));
    }
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({}, {value}, requires_grad); }

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() on a tensor of shape " + shape_str(shape()));
    return node_->data[0];
}

void Tensor::zero_grad() {
    if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::detach() const { return from(node_->shape, node_->data, false); }

Tensor make_result(Shape shape, std::vector<double> data, std::vector<Tensor> parents,
                   std::function<void(Node&)> backward) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    const bool needs = std::any_of(parents.begin(), parents.end(),
                                   [](const Tensor& t) { return t.defined() && t.requires_grad(); });
    if (needs) {
        node->requires_grad = true;
        node->parents.reserve(parents.size());
        for (auto& p : parents) node->parents.push_back(p.defined() ? p.node() : nullptr);
        node->backward = std::move(backward);
    }
    return Tensor(std::move(node));
}

Tape::Tape(const Tensor& loss) {
    // Iterative post-order DFS: a node is emitted after all its parents.
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(loss.node().get(), 0);
    seen.insert(loss.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next++].get();
            if (parent && parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            nodes_.push_back(node);
            stack.pop_back();
        }
    }
}

void backward(const Tensor& loss) {
    if (!loss.defined() || !loss.requires_grad()) {
        throw DomainError("backward() called on a tensor that is not part of a recorded graph");
    }
    if (loss.numel() != 1) throw DomainError("backward() needs a scalar loss, got " + shape_str(loss.shape()));
    const Tape tape(loss);
    for (Node* n : tape.nodes()) {
        // Interior nodes start from zero on every pass; leaves accumulate.
        if (n->backward) n->grad.assign(n->data.size(), 0.0);
    }
    Node& root = *loss.node();
    root.ensure_grad();
    root.grad[0] += 1.0;
    const auto nodes = tape.nodes();
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        Node* n = *it;
        if (!n->backward) continue;
        for (auto& p : n->parents) {
            if (p && p->requires_grad) p->ensure_grad();
        }
        n->backward(*n);
    }
}

}  // namespace voxforge::ad
