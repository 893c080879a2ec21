// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#include "gmd/dct.hpp"

#include <cmath>

#include "gmd/errors.hpp"

namespace gmd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DctBasis build_dct_basis(int seq_len, int components) {
    if (seq_len < 1 || components < 1 || components > seq_len) {
        throw ValidationError("dct: need 1 <= L <= T");
    }
    DctBasis b;
    b.seq_len = seq_len;
    b.components = components;
    b.forward.resize(static_cast<std::size_t>(components) * seq_len);
    b.inverse.resize(static_cast<std::size_t>(seq_len) * components);
    const double scale = std::sqrt(2.0 / seq_len);
    for (int l = 0; l < components; ++l) {
        const double cl = (l == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
        for (int t = 0; t < seq_len; ++t) {
            const double v = cl * scale * std::cos(kPi * (2.0 * t + 1.0) * l / (2.0 * seq_len));
            b.forward[static_cast<std::size_t>(l) * seq_len + t] = v;
            b.inverse[static_cast<std::size_t>(t) * components + l] = v;
        }
    }
    return b;
}

std::vector<double> dct_forward(const DctBasis& basis, const std::vector<double>& x) {
    const int t_len = basis.seq_len;
    const int l_len = basis.components;
    if (x.size() % t_len != 0) throw ValidationError("dct_forward: trailing axis is not T");
    const std::size_t outer = x.size() / t_len;
    std::vector<double> y(outer * l_len, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* xo = x.data() + o * t_len;
        double* yo = y.data() + o * l_len;
        for (int l = 0; l < l_len; ++l) {
            const double* row = basis.forward.data() + static_cast<std::size_t>(l) * t_len;
            double acc = 0.0;
            for (int t = 0; t < t_len; ++t) acc += row[t] * xo[t];
            yo[l] = acc;
        }
    }
    return y;
}

std::vector<double> dct_inverse(const DctBasis& basis, const std::vector<double>& y) {
    const int t_len = basis.seq_len;
    const int l_len = basis.components;
    if (y.size() % l_len != 0) throw ValidationError("dct_inverse: trailing axis is not L");
    const std::size_t outer = y.size() / l_len;
    std::vector<double> x(outer * t_len, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* yo = y.data() + o * l_len;
        double* xo = x.data() + o * t_len;
        for (int t = 0; t < t_len; ++t) {
            const double* row = basis.inverse.data() + static_cast<std::size_t>(t) * l_len;
            double acc = 0.0;
            for (int l = 0; l < l_len; ++l) acc += row[l] * yo[l];
            xo[t] = acc;
        }
    }
    return x;
}

std::vector<double> pad_last_frame(const std::vector<double>& x, int history, int future) {
    if (history < 1) throw ValidationError("pad_last_frame: history must be >= 1");
    if (future < 0) throw ValidationError("pad_last_frame: future must be >= 0");
    if (x.size() % history != 0) throw ValidationError("pad_last_frame: trailing axis is not H");
    const std::size_t outer = x.size() / history;
    const int full = history + future;
    std::vector<double> out(outer * full);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* xo = x.data() + o * history;
        double* oo = out.data() + o * full;
        for (int t = 0; t < history; ++t) oo[t] = xo[t];
        for (int t = history; t < full; ++t) oo[t] = xo[history - 1];
    }
    return out;
}

}  // namespace gmd
