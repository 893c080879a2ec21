// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gmd/rng.hpp"

namespace gmd::nn {

using Shape = std::vector<int>;

std::int64_t numel(const Shape& shape);

// One node of the computation graph. Values and (lazily allocated) gradients
// are double precision so finite-difference checks are meaningful.
struct Node {
    Shape shape;
    std::vector<double> val;
    std::vector<double> grad;  // empty until backward() touches the node
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void(Node&)> backprop;  // accumulates into inputs' grads
    bool requires_grad = false;
    std::uint64_t seq = 0;  // creation order; a valid topological order

    void ensure_grad() {
        if (grad.size() != val.size()) grad.assign(val.size(), 0.0);
    }
};

// Value-semantics handle to a graph node.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    int dim(int i) const { return node_->shape[i]; }
    std::int64_t size() const { return static_cast<std::int64_t>(node_->val.size()); }
    double* data() { return node_->val.data(); }
    const double* data() const { return node_->val.data(); }
    std::vector<double>& values() { return node_->val; }
    const std::vector<double>& values() const { return node_->val; }
    std::vector<double>& grad_values() { return node_->grad; }
    double item() const { return node_->val.at(0); }
    const std::shared_ptr<Node>& node() const { return node_; }

private:
    std::shared_ptr<Node> node_;
};

// --- elementwise & structural ops -----------------------------------------

Tensor add(const Tensor& a, const Tensor& b);        // same shape
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);        // Hadamard
Tensor scale(const Tensor& a, double s);
Tensor square(const Tensor& a);

Tensor matmul(const Tensor& a, const Tensor& b);     // [m,k] x [k,n]
Tensor matvec(const Tensor& a, const Tensor& x);     // [m,k] x [k] -> [m]
Tensor transpose(const Tensor& a);                   // 2-D
Tensor reshape(const Tensor& a, Shape shape);
Tensor permute(const Tensor& a, const std::vector<int>& perm);
Tensor slice(const Tensor& a, int axis, int start, int len);
Tensor concat(const std::vector<Tensor>& parts, int axis);

Tensor add_rows(const Tensor& m, const Tensor& v);   // [R,C] + [C] broadcast over rows
Tensor add_cols(const Tensor& m, const Tensor& v);   // [R,C] + [R] broadcast over columns
Tensor cross_add(const Tensor& u, const Tensor& v);  // [M],[K] -> [M,K]: u[i]+v[k]

Tensor leaky_relu(const Tensor& a, double negative_slope);
Tensor tanh_act(const Tensor& a);
Tensor gelu(const Tensor& a);
Tensor softmax_rows(const Tensor& a);                // 2-D, softmax along axis 1
Tensor softmax_cols(const Tensor& a);                // 2-D, softmax along axis 0

// Layer norm over the trailing axis with affine parameters gamma/beta [C].
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

// 1-D convolution, kernel 3, stride 1, zero same-padding.
// x [C_in, L], w [C_out, C_in, 3], b [C_out] -> [C_out, L].
Tensor conv1d_k3(const Tensor& x, const Tensor& w, const Tensor& b);

// Inverted dropout. Identity when !training or p == 0.
Tensor dropout(const Tensor& x, double p, Rng* rng, bool training);

Tensor sum_all(const Tensor& a);    // -> scalar [1]
Tensor mean_all(const Tensor& a);

// Reverse-mode sweep from a scalar loss. Gradients accumulate into every
// reachable node that requires grad (directly or through its inputs).
void backward(const Tensor& loss);

// --- parameters ------------------------------------------------------------

struct NamedParam {
    std::string name;
    Tensor tensor;
};
using ParamList = std::vector<NamedParam>;

// Leaf parameter with requires_grad set.
Tensor parameter(Shape shape);
// Glorot-uniform initialization in place.
void glorot_init(Tensor& t, int fan_in, int fan_out, Rng& rng);
void zero_grad(ParamList& params);

}  // namespace gmd::nn
