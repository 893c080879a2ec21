// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace gmd {

// Orthonormal DCT-II, truncated to the first L modes. Sequences of length T
// map to L coefficients and back; at L == T the round trip is exact up to
// float rounding, below that it is an orthogonal projection.
struct DctBasis {
    int seq_len = 0;      // T
    int components = 0;   // L
    std::vector<double> forward;  // [L, T]
    std::vector<double> inverse;  // [T, L], transpose of the full basis truncated to L columns
};

DctBasis build_dct_basis(int seq_len, int components);

// Apply along the trailing axis. x is [outer, T] flattened; result [outer, L].
std::vector<double> dct_forward(const DctBasis& basis, const std::vector<double>& x);

// Inverse along the trailing axis. y is [outer, L] flattened; result [outer, T].
std::vector<double> dct_inverse(const DctBasis& basis, const std::vector<double>& y);

// Repeat the final frame: [outer, H] -> [outer, H+F] with frames H..H+F-1
// equal to frame H-1.
std::vector<double> pad_last_frame(const std::vector<double>& x, int history, int future);

}  // namespace gmd
