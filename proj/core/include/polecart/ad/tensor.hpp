#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace polecart::ad {

namespace detail {

struct Node {
    int rows = 0;
    int cols = 0;
    std::vector<double> value;
    std::vector<double> grad;  // persistent accumulator, empty until first backward
    std::vector<double> adj;   // scratch adjoint, only meaningful inside backward()
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this node's adj and accumulates into the parents' adj buffers.
    std::function<void(Node&)> backprop;
};

bool grad_enabled();
void set_grad_enabled(bool on);

}  // namespace detail

/// Scope guard that turns off graph recording. Forwards executed under the
/// guard produce plain constants (action selection, TD targets).
class NoGradGuard {
public:
    NoGradGuard() : prev_(detail::grad_enabled()) { detail::set_grad_enabled(false); }
    ~NoGradGuard() { detail::set_grad_enabled(prev_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

/// Dense 2-D double tensor. The handle has value semantics; the underlying
/// node is shared so operations can hold their operands in the backward graph.
///
/// A tensor created with requires_grad=true is a trainable leaf: backward()
/// accumulates d(loss)/d(tensor) into grad(), and repeated backward() calls
/// keep accumulating until zero_grad().
class Tensor {
public:
    Tensor() = default;
    Tensor(int rows, int cols, std::vector<double> values, bool requires_grad = false);

    static Tensor zeros(int rows, int cols, bool requires_grad = false);
    static Tensor ones(int rows, int cols, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);
    static Tensor row(std::vector<double> values, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    int rows() const { return node_->rows; }
    int cols() const { return node_->cols; }
    int size() const { return static_cast<int>(node_->value.size()); }

    double at(int r, int c) const { return node_->value[static_cast<std::size_t>(r) * node_->cols + c]; }
    /// Value of a scalar ([1x1]) tensor.
    double item() const;

    const std::vector<double>& values() const { return node_->value; }
    /// Direct mutable access to the stored values (optimizer updates,
    /// finite-difference probing). Only sensible on leaf tensors.
    std::vector<double>& mutable_values() { return node_->value; }

    bool requires_grad() const { return node_->requires_grad; }
    bool has_grad() const { return !node_->grad.empty(); }
    const std::vector<double>& grad() const { return node_->grad; }
    double grad_at(int r, int c) const { return node_->grad[static_cast<std::size_t>(r) * node_->cols + c]; }
    void zero_grad();

    /// A leaf copy of this tensor's values with no graph history.
    Tensor detached_copy(bool requires_grad = false) const;

    std::string shape_str() const;

    const std::shared_ptr<detail::Node>& node() const { return node_; }

private:
    std::shared_ptr<detail::Node> node_;
};

/// Reverse-mode sweep from a scalar loss. Visits every reachable node exactly
/// once and accumulates gradients into every tensor with requires_grad set.
/// Throws std::invalid_argument if loss is not scalar.
void backward(const Tensor& loss);

// ---- primitives -----------------------------------------------------------
//
// Shapes must match exactly, except that the binary elementwise ops also
// accept a [1 x n] second operand broadcast over the rows of an [m x n] first
// operand. Shape violations throw std::invalid_argument naming both shapes.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double s);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);

/// Row-wise softmax with max subtraction. Every output row is non-negative
/// and sums to 1.
Tensor softmax_rows(const Tensor& a);

/// Per-row normalization to zero mean / unit variance, then y * gain + bias.
/// gain and bias are [1 x cols] rows broadcast over the input's rows.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

/// Mean over all elements of the squared difference.
Tensor mse_loss(const Tensor& pred, const Tensor& target);

Tensor sum_all(const Tensor& a);

Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);

/// The r-th row as a [1 x cols] tensor.
Tensor slice_row(const Tensor& a, int r);

/// Per-row column pick: result[r, 0] = a[r, col_per_row[r]].
Tensor gather_cols(const Tensor& a, const std::vector<int>& col_per_row);

}  // namespace polecart::ad
