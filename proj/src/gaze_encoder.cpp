// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#include "gmd/gaze_encoder.hpp"

#include "gmd/errors.hpp"

namespace gmd {

using nn::Tensor;

GazeEncoderParams make_gaze_encoder(Rng& rng, int hidden_channels) {
    GazeEncoderParams p;
    const int channels[5] = {3, hidden_channels, hidden_channels, hidden_channels, 3};
    for (int layer = 0; layer < 4; ++layer) {
        const int c_in = channels[layer], c_out = channels[layer + 1];
        p.conv_w[layer] = nn::parameter({c_out, c_in, 3});
        nn::glorot_init(p.conv_w[layer], c_in * 3, c_out, rng);
        p.conv_b[layer] = nn::parameter({c_out});
    }
    for (int layer = 0; layer < 3; ++layer) {
        p.ln_gamma[layer] = nn::parameter({hidden_channels});
        std::fill(p.ln_gamma[layer].values().begin(), p.ln_gamma[layer].values().end(), 1.0);
        p.ln_beta[layer] = nn::parameter({hidden_channels});
    }
    return p;
}

namespace {

// LayerNorm over channels per temporal position: x [C, L].
Tensor norm_channels_1d(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
    Tensor rows = nn::transpose(x);  // [L, C]
    return nn::transpose(nn::layer_norm(rows, gamma, beta));
}

}  // namespace

Tensor gaze_encode(const GazeEncoderParams& p, const Tensor& g_dct) {
    if (g_dct.shape().size() != 3 || g_dct.dim(0) != 3 || g_dct.dim(1) != 1) {
        throw ValidationError("gaze_encode: input must be [3, 1, L]");
    }
    const int len = g_dct.dim(2);
    Tensor x = nn::reshape(g_dct, {3, len});
    for (int layer = 0; layer < 3; ++layer) {
        x = nn::conv1d_k3(x, p.conv_w[layer], p.conv_b[layer]);
        x = norm_channels_1d(x, p.ln_gamma[layer], p.ln_beta[layer]);
        x = nn::tanh_act(x);
    }
    x = nn::conv1d_k3(x, p.conv_w[3], p.conv_b[3]);
    x = nn::tanh_act(x);
    return nn::reshape(x, {3, 1, len});
}

void collect_gaze_encoder(const GazeEncoderParams& p, const std::string& prefix, nn::ParamList& out) {
    for (int layer = 0; layer < 4; ++layer) {
        const std::string base = prefix + ".conv" + std::to_string(layer);
        out.push_back({base + ".w", p.conv_w[layer]});
        out.push_back({base + ".b", p.conv_b[layer]});
    }
    for (int layer = 0; layer < 3; ++layer) {
        const std::string base = prefix + ".ln" + std::to_string(layer);
        out.push_back({base + ".gamma", p.ln_gamma[layer]});
        out.push_back({base + ".beta", p.ln_beta[layer]});
    }
}

}  // namespace gmd
