#include "polecart/ad/tensor.hpp"

#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace polecart::ad {

namespace detail {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }
void set_grad_enabled(bool on) { g_grad_enabled = on; }

}  // namespace detail

Tensor::Tensor(int rows, int cols, std::vector<double> values, bool requires_grad) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("Tensor: dimensions must be positive");
    }
    if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
        throw std::invalid_argument("Tensor: data length does not match shape");
    }
    node_ = std::make_shared<detail::Node>();
    node_->rows = rows;
    node_->cols = cols;
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
    return Tensor(rows, cols,
                  std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0),
                  requires_grad);
}

Tensor Tensor::ones(int rows, int cols, bool requires_grad) {
    return Tensor(rows, cols,
                  std::vector<double>(static_cast<std::size_t>(rows) * cols, 1.0),
                  requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor(1, 1, {v}, requires_grad);
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
    const int n = static_cast<int>(values.size());
    return Tensor(1, n, std::move(values), requires_grad);
}

double Tensor::item() const {
    if (size() != 1) {
        throw std::invalid_argument("Tensor::item: tensor " + shape_str() + " is not scalar");
    }
    return node_->value[0];
}

void Tensor::zero_grad() {
    node_->grad.clear();
}

Tensor Tensor::detached_copy(bool requires_grad) const {
    return Tensor(rows(), cols(), node_->value, requires_grad);
}

std::string Tensor::shape_str() const {
    if (!node_) return "[undefined]";
    return "[" + std::to_string(node_->rows) + "x" + std::to_string(node_->cols) + "]";
}

void backward(const Tensor& loss) {
    if (!loss.defined() || loss.size() != 1) {
        throw std::invalid_argument("backward: loss must be a scalar [1x1] tensor, got " +
                                    loss.shape_str());
    }

    detail::Node* root = loss.node().get();

    // Iterative post-order DFS: every node lands after all of its parents,
    // so the reversed order is a valid root-to-leaves schedule.
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    std::vector<std::pair<detail::Node*, std::size_t>> stack;
    stack.emplace_back(root, 0);
    seen.insert(root);
    while (!stack.empty()) {
        auto& [node, next_parent] = stack.back();
        if (next_parent < node->parents.size()) {
            detail::Node* parent = node->parents[next_parent++].get();
            if (seen.insert(parent).second) {
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    for (detail::Node* n : order) {
        n->adj.assign(n->value.size(), 0.0);
    }
    root->adj[0] = 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::Node* n = *it;
        if (n->backprop) n->backprop(*n);
    }

    for (detail::Node* n : order) {
        if (n->requires_grad) {
            if (n->grad.empty()) n->grad.assign(n->value.size(), 0.0);
            for (std::size_t i = 0; i < n->adj.size(); ++i) n->grad[i] += n->adj[i];
        }
        n->adj.clear();
    }
}

}  // namespace polecart::ad
