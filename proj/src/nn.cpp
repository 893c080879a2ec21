// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#include "gmd/nn.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "gmd/errors.hpp"

namespace gmd::nn {

namespace {

std::uint64_t next_seq() {
    static std::uint64_t counter = 0;
    return ++counter;
}

std::shared_ptr<Node> make_node(Shape shape, std::vector<std::shared_ptr<Node>> inputs) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->val.resize(numel(n->shape), 0.0);
    n->inputs = std::move(inputs);
    n->seq = next_seq();
    for (const auto& in : n->inputs) {
        if (in->requires_grad) {
            n->requires_grad = true;
            break;
        }
    }
    return n;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) throw ValidationError(std::string(op) + ": shape mismatch");
}

std::vector<std::int64_t> strides_of(const Shape& shape) {
    std::vector<std::int64_t> st(shape.size(), 1);
    for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) {
        st[i] = st[i + 1] * shape[i + 1];
    }
    return st;
}

}  // namespace

std::int64_t numel(const Shape& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    auto n = make_node(std::move(shape), {});
    n->requires_grad = requires_grad;
    return Tensor(n);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    std::fill(t.values().begin(), t.values().end(), value);
    return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    if (static_cast<std::int64_t>(values.size()) != numel(shape)) {
        throw ValidationError("tensor: value count does not match shape");
    }
    Tensor t = zeros(std::move(shape), requires_grad);
    t.values() = std::move(values);
    return t;
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    auto n = make_node(a.shape(), {a.node(), b.node()});
    for (std::int64_t i = 0; i < a.size(); ++i) n->val[i] = a.data()[i] + b.data()[i];
    n->backprop = [](Node& self) {
        for (int k = 0; k < 2; ++k) {
            Node& in = *self.inputs[k];
            in.ensure_grad();
            for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i];
        }
    };
    return Tensor(n);
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    auto n = make_node(a.shape(), {a.node(), b.node()});
    for (std::int64_t i = 0; i < a.size(); ++i) n->val[i] = a.data()[i] - b.data()[i];
    n->backprop = [](Node& self) {
        Node& a_in = *self.inputs[0];
        Node& b_in = *self.inputs[1];
        a_in.ensure_grad();
        b_in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            a_in.grad[i] += self.grad[i];
            b_in.grad[i] -= self.grad[i];
        }
    };
    return Tensor(n);
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    auto n = make_node(a.shape(), {a.node(), b.node()});
    for (std::int64_t i = 0; i < a.size(); ++i) n->val[i] = a.data()[i] * b.data()[i];
    n->backprop = [](Node& self) {
        Node& a_in = *self.inputs[0];
        Node& b_in = *self.inputs[1];
        a_in.ensure_grad();
        b_in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            a_in.grad[i] += self.grad[i] * b_in.val[i];
            b_in.grad[i] += self.grad[i] * a_in.val[i];
        }
    };
    return Tensor(n);
}

Tensor scale(const Tensor& a, double s) {
    auto n = make_node(a.shape(), {a.node()});
    for (std::int64_t i = 0; i < a.size(); ++i) n->val[i] = a.data()[i] * s;
    n->backprop = [s](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i] * s;
    };
    return Tensor(n);
}

Tensor square(const Tensor& a) { return mul(a, a); }

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(1) != b.dim(0)) {
        throw ValidationError("matmul: needs [m,k] x [k,n]");
    }
    const int m = a.dim(0), k = a.dim(1), n_cols = b.dim(1);
    auto n = make_node({m, n_cols}, {a.node(), b.node()});
    const double* av = a.data();
    const double* bv = b.data();
    for (int i = 0; i < m; ++i) {
        for (int kk = 0; kk < k; ++kk) {
            const double aik = av[i * k + kk];
            if (aik == 0.0) continue;
            const double* brow = bv + static_cast<std::size_t>(kk) * n_cols;
            double* out = n->val.data() + static_cast<std::size_t>(i) * n_cols;
            for (int jj = 0; jj < n_cols; ++jj) out[jj] += aik * brow[jj];
        }
    }
    n->backprop = [m, k, n_cols](Node& self) {
        Node& a_in = *self.inputs[0];
        Node& b_in = *self.inputs[1];
        a_in.ensure_grad();
        b_in.ensure_grad();
        // dA += g * B^T
        for (int i = 0; i < m; ++i) {
            for (int kk = 0; kk < k; ++kk) {
                double acc = 0.0;
                const double* grow = self.grad.data() + static_cast<std::size_t>(i) * n_cols;
                const double* brow = b_in.val.data() + static_cast<std::size_t>(kk) * n_cols;
                for (int jj = 0; jj < n_cols; ++jj) acc += grow[jj] * brow[jj];
                a_in.grad[static_cast<std::size_t>(i) * k + kk] += acc;
            }
        }
        // dB += A^T * g
        for (int kk = 0; kk < k; ++kk) {
            for (int i = 0; i < m; ++i) {
                const double aik = a_in.val[static_cast<std::size_t>(i) * k + kk];
                if (aik == 0.0) continue;
                const double* grow = self.grad.data() + static_cast<std::size_t>(i) * n_cols;
                double* brow = b_in.grad.data() + static_cast<std::size_t>(kk) * n_cols;
                for (int jj = 0; jj < n_cols; ++jj) brow[jj] += aik * grow[jj];
            }
        }
    };
    return Tensor(n);
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    if (a.shape().size() != 2 || x.shape().size() != 1 || a.dim(1) != x.dim(0)) {
        throw ValidationError("matvec: needs [m,k] x [k]");
    }
    const int m = a.dim(0), k = a.dim(1);
    auto n = make_node({m}, {a.node(), x.node()});
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* arow = a.data() + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) acc += arow[kk] * x.data()[kk];
        n->val[i] = acc;
    }
    n->backprop = [m, k](Node& self) {
        Node& a_in = *self.inputs[0];
        Node& x_in = *self.inputs[1];
        a_in.ensure_grad();
        x_in.ensure_grad();
        for (int i = 0; i < m; ++i) {
            const double g = self.grad[i];
            if (g == 0.0) continue;
            const double* arow = a_in.val.data() + static_cast<std::size_t>(i) * k;
            double* agrow = a_in.grad.data() + static_cast<std::size_t>(i) * k;
            for (int kk = 0; kk < k; ++kk) {
                agrow[kk] += g * x_in.val[kk];
                x_in.grad[kk] += g * arow[kk];
            }
        }
    };
    return Tensor(n);
}

Tensor transpose(const Tensor& a) {
    if (a.shape().size() != 2) throw ValidationError("transpose: needs 2-D");
    const int r = a.dim(0), c = a.dim(1);
    auto n = make_node({c, r}, {a.node()});
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            n->val[static_cast<std::size_t>(j) * r + i] = a.data()[static_cast<std::size_t>(i) * c + j];
        }
    }
    n->backprop = [r, c](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) {
                in.grad[static_cast<std::size_t>(i) * c + j] +=
                    self.grad[static_cast<std::size_t>(j) * r + i];
            }
        }
    };
    return Tensor(n);
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (numel(shape) != a.size()) throw ValidationError("reshape: element count mismatch");
    auto n = make_node(std::move(shape), {a.node()});
    n->val = a.values();
    n->backprop = [](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i];
    };
    return Tensor(n);
}

Tensor permute(const Tensor& a, const std::vector<int>& perm) {
    const Shape& in_shape = a.shape();
    if (perm.size() != in_shape.size()) throw ValidationError("permute: rank mismatch");
    Shape out_shape(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) out_shape[i] = in_shape[perm[i]];
    auto n = make_node(out_shape, {a.node()});

    const auto in_strides = strides_of(in_shape);
    const auto out_strides = strides_of(out_shape);
    const std::int64_t count = a.size();
    const int rank = static_cast<int>(perm.size());
    std::vector<std::int64_t> src_of(count);
    for (std::int64_t oi = 0; oi < count; ++oi) {
        std::int64_t rem = oi, src = 0;
        for (int d = 0; d < rank; ++d) {
            const std::int64_t idx = rem / out_strides[d];
            rem %= out_strides[d];
            src += idx * in_strides[perm[d]];
        }
        src_of[oi] = src;
        n->val[oi] = a.data()[src];
    }
    n->backprop = [src_of = std::move(src_of)](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t oi = 0; oi < self.grad.size(); ++oi) in.grad[src_of[oi]] += self.grad[oi];
    };
    return Tensor(n);
}

Tensor slice(const Tensor& a, int axis, int start, int len) {
    const Shape& in_shape = a.shape();
    if (axis < 0 || axis >= static_cast<int>(in_shape.size())) throw ValidationError("slice: bad axis");
    if (start < 0 || len < 1 || start + len > in_shape[axis]) throw ValidationError("slice: bad range");
    Shape out_shape = in_shape;
    out_shape[axis] = len;

    std::int64_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= in_shape[d];
    for (int d = axis + 1; d < static_cast<int>(in_shape.size()); ++d) inner *= in_shape[d];
    const std::int64_t in_axis = in_shape[axis];

    auto n = make_node(out_shape, {a.node()});
    for (std::int64_t o = 0; o < outer; ++o) {
        for (int l = 0; l < len; ++l) {
            const double* src = a.data() + (o * in_axis + start + l) * inner;
            double* dst = n->val.data() + (o * len + l) * inner;
            std::copy(src, src + inner, dst);
        }
    }
    n->backprop = [outer, inner, in_axis, start, len](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::int64_t o = 0; o < outer; ++o) {
            for (int l = 0; l < len; ++l) {
                const double* g = self.grad.data() + (o * len + l) * inner;
                double* dst = in.grad.data() + (o * in_axis + start + l) * inner;
                for (std::int64_t i = 0; i < inner; ++i) dst[i] += g[i];
            }
        }
    };
    return Tensor(n);
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw ValidationError("concat: no inputs");
    const Shape& first = parts[0].shape();
    if (axis < 0 || axis >= static_cast<int>(first.size())) throw ValidationError("concat: bad axis");
    Shape out_shape = first;
    int axis_total = 0;
    std::vector<std::shared_ptr<Node>> inputs;
    for (const auto& p : parts) {
        const Shape& s = p.shape();
        if (s.size() != first.size()) throw ValidationError("concat: rank mismatch");
        for (int d = 0; d < static_cast<int>(s.size()); ++d) {
            if (d != axis && s[d] != first[d]) throw ValidationError("concat: shape mismatch");
        }
        axis_total += s[axis];
        inputs.push_back(p.node());
    }
    out_shape[axis] = axis_total;

    std::int64_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= first[d];
    for (int d = axis + 1; d < static_cast<int>(first.size()); ++d) inner *= first[d];

    auto n = make_node(out_shape, std::move(inputs));
    std::vector<int> axis_sizes;
    for (const auto& p : parts) axis_sizes.push_back(p.shape()[axis]);
    for (std::int64_t o = 0; o < outer; ++o) {
        int offset = 0;
        for (std::size_t pi = 0; pi < parts.size(); ++pi) {
            const int alen = axis_sizes[pi];
            const double* src = parts[pi].data() + o * alen * inner;
            double* dst = n->val.data() + (o * axis_total + offset) * inner;
            std::copy(src, src + alen * inner, dst);
            offset += alen;
        }
    }
    n->backprop = [outer, inner, axis_total, axis_sizes](Node& self) {
        for (std::size_t pi = 0; pi < self.inputs.size(); ++pi) self.inputs[pi]->ensure_grad();
        for (std::int64_t o = 0; o < outer; ++o) {
            int offset = 0;
            for (std::size_t pi = 0; pi < self.inputs.size(); ++pi) {
                const int alen = axis_sizes[pi];
                const double* g = self.grad.data() + (o * axis_total + offset) * inner;
                double* dst = self.inputs[pi]->grad.data() + o * alen * inner;
                for (std::int64_t i = 0; i < static_cast<std::int64_t>(alen) * inner; ++i) dst[i] += g[i];
                offset += alen;
            }
        }
    };
    return Tensor(n);
}

Tensor add_rows(const Tensor& m, const Tensor& v) {
    if (m.shape().size() != 2 || v.shape().size() != 1 || m.dim(1) != v.dim(0)) {
        throw ValidationError("add_rows: needs [R,C] + [C]");
    }
    const int rows = m.dim(0), cols = m.dim(1);
    auto n = make_node(m.shape(), {m.node(), v.node()});
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            n->val[static_cast<std::size_t>(r) * cols + c] =
                m.data()[static_cast<std::size_t>(r) * cols + c] + v.data()[c];
        }
    }
    n->backprop = [rows, cols](Node& self) {
        Node& m_in = *self.inputs[0];
        Node& v_in = *self.inputs[1];
        m_in.ensure_grad();
        v_in.ensure_grad();
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double g = self.grad[static_cast<std::size_t>(r) * cols + c];
                m_in.grad[static_cast<std::size_t>(r) * cols + c] += g;
                v_in.grad[c] += g;
            }
        }
    };
    return Tensor(n);
}

Tensor add_cols(const Tensor& m, const Tensor& v) {
    if (m.shape().size() != 2 || v.shape().size() != 1 || m.dim(0) != v.dim(0)) {
        throw ValidationError("add_cols: needs [R,C] + [R]");
    }
    const int rows = m.dim(0), cols = m.dim(1);
    auto n = make_node(m.shape(), {m.node(), v.node()});
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            n->val[static_cast<std::size_t>(r) * cols + c] =
                m.data()[static_cast<std::size_t>(r) * cols + c] + v.data()[r];
        }
    }
    n->backprop = [rows, cols](Node& self) {
        Node& m_in = *self.inputs[0];
        Node& v_in = *self.inputs[1];
        m_in.ensure_grad();
        v_in.ensure_grad();
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const double g = self.grad[static_cast<std::size_t>(r) * cols + c];
                m_in.grad[static_cast<std::size_t>(r) * cols + c] += g;
                v_in.grad[r] += g;
            }
        }
    };
    return Tensor(n);
}

Tensor cross_add(const Tensor& u, const Tensor& v) {
    if (u.shape().size() != 1 || v.shape().size() != 1) throw ValidationError("cross_add: needs vectors");
    const int m = u.dim(0), k = v.dim(0);
    auto n = make_node({m, k}, {u.node(), v.node()});
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < k; ++j) n->val[static_cast<std::size_t>(i) * k + j] = u.data()[i] + v.data()[j];
    }
    n->backprop = [m, k](Node& self) {
        Node& u_in = *self.inputs[0];
        Node& v_in = *self.inputs[1];
        u_in.ensure_grad();
        v_in.ensure_grad();
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < k; ++j) {
                const double g = self.grad[static_cast<std::size_t>(i) * k + j];
                u_in.grad[i] += g;
                v_in.grad[j] += g;
            }
        }
    };
    return Tensor(n);
}

Tensor leaky_relu(const Tensor& a, double negative_slope) {
    auto n = make_node(a.shape(), {a.node()});
    for (std::int64_t i = 0; i < a.size(); ++i) {
        const double x = a.data()[i];
        n->val[i] = x > 0.0 ? x : negative_slope * x;
    }
    n->backprop = [negative_slope](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            in.grad[i] += self.grad[i] * (in.val[i] > 0.0 ? 1.0 : negative_slope);
        }
    };
    return Tensor(n);
}

Tensor tanh_act(const Tensor& a) {
    auto n = make_node(a.shape(), {a.node()});
    for (std::int64_t i = 0; i < a.size(); ++i) n->val[i] = std::tanh(a.data()[i]);
    n->backprop = [](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            in.grad[i] += self.grad[i] * (1.0 - self.val[i] * self.val[i]);
        }
    };
    return Tensor(n);
}

Tensor gelu(const Tensor& a) {
    auto n = make_node(a.shape(), {a.node()});
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    constexpr double inv_sqrt2pi = 0.39894228040143267794;
    for (std::int64_t i = 0; i < a.size(); ++i) {
        const double x = a.data()[i];
        n->val[i] = 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
    }
    n->backprop = [inv_sqrt2, inv_sqrt2pi](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
            const double x = in.val[i];
            const double cdf = 0.5 * (1.0 + std::erf(x * inv_sqrt2));
            const double pdf = inv_sqrt2pi * std::exp(-0.5 * x * x);
            in.grad[i] += self.grad[i] * (cdf + x * pdf);
        }
    };
    return Tensor(n);
}

Tensor softmax_rows(const Tensor& a) {
    if (a.shape().size() != 2) throw ValidationError("softmax_rows: needs 2-D");
    const int rows = a.dim(0), cols = a.dim(1);
    auto n = make_node(a.shape(), {a.node()});
    for (int r = 0; r < rows; ++r) {
        const double* x = a.data() + static_cast<std::size_t>(r) * cols;
        double* y = n->val.data() + static_cast<std::size_t>(r) * cols;
        double mx = x[0];
        for (int c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
        double sum = 0.0;
        for (int c = 0; c < cols; ++c) {
            y[c] = std::exp(x[c] - mx);
            sum += y[c];
        }
        for (int c = 0; c < cols; ++c) y[c] /= sum;
    }
    n->backprop = [rows, cols](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (int r = 0; r < rows; ++r) {
            const double* y = self.val.data() + static_cast<std::size_t>(r) * cols;
            const double* g = self.grad.data() + static_cast<std::size_t>(r) * cols;
            double dot = 0.0;
            for (int c = 0; c < cols; ++c) dot += y[c] * g[c];
            double* gi = in.grad.data() + static_cast<std::size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) gi[c] += (g[c] - dot) * y[c];
        }
    };
    return Tensor(n);
}

Tensor softmax_cols(const Tensor& a) { return transpose(softmax_rows(transpose(a))); }

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    const Shape& s = x.shape();
    const int cols = s.back();
    if (gamma.shape() != Shape{cols} || beta.shape() != Shape{cols}) {
        throw ValidationError("layer_norm: gamma/beta must be [C]");
    }
    const std::int64_t rows = x.size() / cols;
    auto n = make_node(s, {x.node(), gamma.node(), beta.node()});
    std::vector<double> xhat(x.size());
    std::vector<double> inv_std(rows);
    for (std::int64_t r = 0; r < rows; ++r) {
        const double* xr = x.data() + r * cols;
        double mean = 0.0;
        for (int c = 0; c < cols; ++c) mean += xr[c];
        mean /= cols;
        double var = 0.0;
        for (int c = 0; c < cols; ++c) {
            const double d = xr[c] - mean;
            var += d * d;
        }
        var /= cols;
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[r] = is;
        for (int c = 0; c < cols; ++c) {
            const double xh = (xr[c] - mean) * is;
            xhat[r * cols + c] = xh;
            n->val[r * cols + c] = gamma.data()[c] * xh + beta.data()[c];
        }
    }
    n->backprop = [rows, cols, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        Node& x_in = *self.inputs[0];
        Node& g_in = *self.inputs[1];
        Node& b_in = *self.inputs[2];
        x_in.ensure_grad();
        g_in.ensure_grad();
        b_in.ensure_grad();
        for (std::int64_t r = 0; r < rows; ++r) {
            const double* g = self.grad.data() + r * cols;
            const double* xh = xhat.data() + r * cols;
            double mean_gh = 0.0, mean_ghxh = 0.0;
            for (int c = 0; c < cols; ++c) {
                const double gh = g[c] * g_in.val[c];
                mean_gh += gh;
                mean_ghxh += gh * xh[c];
                g_in.grad[c] += g[c] * xh[c];
                b_in.grad[c] += g[c];
            }
            mean_gh /= cols;
            mean_ghxh /= cols;
            double* gx = x_in.grad.data() + r * cols;
            for (int c = 0; c < cols; ++c) {
                const double gh = g[c] * g_in.val[c];
                gx[c] += (gh - mean_gh - xh[c] * mean_ghxh) * inv_std[r];
            }
        }
    };
    return Tensor(n);
}

Tensor conv1d_k3(const Tensor& x, const Tensor& w, const Tensor& b) {
    if (x.shape().size() != 2 || w.shape().size() != 3 || w.dim(2) != 3 || b.shape().size() != 1) {
        throw ValidationError("conv1d_k3: needs x [Cin,L], w [Cout,Cin,3], b [Cout]");
    }
    const int c_in = x.dim(0), length = x.dim(1);
    const int c_out = w.dim(0);
    if (w.dim(1) != c_in || b.dim(0) != c_out) throw ValidationError("conv1d_k3: channel mismatch");

    auto n = make_node({c_out, length}, {x.node(), w.node(), b.node()});
    for (int co = 0; co < c_out; ++co) {
        for (int t = 0; t < length; ++t) {
            double acc = b.data()[co];
            for (int ci = 0; ci < c_in; ++ci) {
                const double* xr = x.data() + static_cast<std::size_t>(ci) * length;
                const double* wk = w.data() + (static_cast<std::size_t>(co) * c_in + ci) * 3;
                if (t - 1 >= 0) acc += xr[t - 1] * wk[0];
                acc += xr[t] * wk[1];
                if (t + 1 < length) acc += xr[t + 1] * wk[2];
            }
            n->val[static_cast<std::size_t>(co) * length + t] = acc;
        }
    }
    n->backprop = [c_in, c_out, length](Node& self) {
        Node& x_in = *self.inputs[0];
        Node& w_in = *self.inputs[1];
        Node& b_in = *self.inputs[2];
        x_in.ensure_grad();
        w_in.ensure_grad();
        b_in.ensure_grad();
        for (int co = 0; co < c_out; ++co) {
            const double* g = self.grad.data() + static_cast<std::size_t>(co) * length;
            for (int t = 0; t < length; ++t) b_in.grad[co] += g[t];
            for (int ci = 0; ci < c_in; ++ci) {
                const double* xr = x_in.val.data() + static_cast<std::size_t>(ci) * length;
                double* xg = x_in.grad.data() + static_cast<std::size_t>(ci) * length;
                const double* wk = w_in.val.data() + (static_cast<std::size_t>(co) * c_in + ci) * 3;
                double* wg = w_in.grad.data() + (static_cast<std::size_t>(co) * c_in + ci) * 3;
                for (int t = 0; t < length; ++t) {
                    const double gt = g[t];
                    if (gt == 0.0) continue;
                    if (t - 1 >= 0) {
                        wg[0] += gt * xr[t - 1];
                        xg[t - 1] += gt * wk[0];
                    }
                    wg[1] += gt * xr[t];
                    xg[t] += gt * wk[1];
                    if (t + 1 < length) {
                        wg[2] += gt * xr[t + 1];
                        xg[t + 1] += gt * wk[2];
                    }
                }
            }
        }
    };
    return Tensor(n);
}

Tensor dropout(const Tensor& x, double p, Rng* rng, bool training) {
    if (!training || p <= 0.0) return x;
    if (p >= 1.0) throw ValidationError("dropout: p must be < 1");
    if (rng == nullptr) throw ValidationError("dropout: training mode needs an rng");
    auto n = make_node(x.shape(), {x.node()});
    std::vector<double> mask(x.size());
    const double keep_scale = 1.0 / (1.0 - p);
    for (std::int64_t i = 0; i < x.size(); ++i) {
        mask[i] = rng->uniform() < p ? 0.0 : keep_scale;
        n->val[i] = x.data()[i] * mask[i];
    }
    n->backprop = [mask = std::move(mask)](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) in.grad[i] += self.grad[i] * mask[i];
    };
    return Tensor(n);
}

Tensor sum_all(const Tensor& a) {
    auto n = make_node({1}, {a.node()});
    double acc = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) acc += a.data()[i];
    n->val[0] = acc;
    n->backprop = [](Node& self) {
        Node& in = *self.inputs[0];
        in.ensure_grad();
        for (std::size_t i = 0; i < in.grad.size(); ++i) in.grad[i] += self.grad[0];
    };
    return Tensor(n);
}

Tensor mean_all(const Tensor& a) { return scale(sum_all(a), 1.0 / static_cast<double>(a.size())); }

void backward(const Tensor& loss) {
    if (loss.size() != 1) throw ValidationError("backward: loss must be scalar");

    // Creation order is a topological order, so a reachability sweep plus a
    // sort by seq descending gives reverse-topological execution.
    std::vector<Node*> reachable;
    std::unordered_set<Node*> seen;
    std::vector<Node*> stack{loss.node().get()};
    seen.insert(loss.node().get());
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        reachable.push_back(n);
        for (const auto& in : n->inputs) {
            if (seen.insert(in.get()).second) stack.push_back(in.get());
        }
    }
    std::sort(reachable.begin(), reachable.end(),
              [](const Node* a, const Node* b) { return a->seq > b->seq; });

    for (Node* n : reachable) n->ensure_grad();
    loss.node()->grad[0] = 1.0;
    for (Node* n : reachable) {
        if (n->backprop && n->requires_grad) n->backprop(*n);
    }
}

Tensor parameter(Shape shape) { return Tensor::zeros(std::move(shape), true); }

void glorot_init(Tensor& t, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::int64_t i = 0; i < t.size(); ++i) {
        t.data()[i] = (rng.uniform() * 2.0 - 1.0) * limit;
    }
}

void zero_grad(ParamList& params) {
    for (auto& p : params) {
        auto& g = p.tensor.node()->grad;
        std::fill(g.begin(), g.end(), 0.0);
    }
}

}  // namespace gmd::nn
