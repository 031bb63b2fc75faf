// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

// Dense float64 tensors with define-by-run reverse-mode differentiation.
//
// Every op that has at least one input requiring a gradient records a node
// holding its inputs and a backward closure. backward(loss) orders the
// recorded nodes reachable from the loss topologically (the tape) and runs
// each closure exactly once in reverse. A graph and its tensors belong to
// the thread that built them.
namespace voxforge::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

struct Node {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // empty until a backward pass reaches the node
    bool requires_grad{false};
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this->grad and accumulates into the parents' grads.
    std::function<void(Node&)> backward;

    void ensure_grad() {
        if (grad.empty()) grad.assign(data.size(), 0.0);
    }
};

class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    // Throws ShapeError when data.size() differs from the shape's element count.
    static Tensor from(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
    std::size_t numel() const { return node_->data.size(); }

    std::span<const double> data() const { return node_->data; }
    // Mutable access is meant for parameters and inputs, not op results
    // that are still part of a live graph.
    std::span<double> mutable_data() { return node_->data; }
    std::span<const double> grad() const { return node_->grad; }
    std::span<double> mutable_grad() {
        node_->ensure_grad();
        return node_->grad;
    }
    bool has_grad() const { return !node_->grad.empty(); }
    bool requires_grad() const { return node_->requires_grad; }
    double item() const;

    void zero_grad();
    // Same values, cut from the graph.
    Tensor detach() const;
    Tensor clone() const { return detach(); }

    const std::shared_ptr<Node>& node() const { return node_; }

private:
    std::shared_ptr<Node> node_;
};

// Builds a result node. When no parent requires a gradient the result is a
// constant and nothing is recorded.
Tensor make_result(Shape shape, std::vector<double> data, std::vector<Tensor> parents,
                   std::function<void(Node&)> backward);

// The topologically ordered nodes that a backward pass from `loss` visits.
class Tape {
public:
    explicit Tape(const Tensor& loss);
    std::span<Node* const> nodes() const { return nodes_; }

private:
    std::vector<Node*> nodes_;
};

// Accumulates d(loss)/d(leaf) into every leaf that requires a gradient.
// Throws DomainError when loss is not a scalar or does not require grad.
void backward(const Tensor& loss);

}  // namespace voxforge::ad
