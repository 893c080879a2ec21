// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gmd/nn.hpp"

namespace gmd {

// Four conv1d layers, kernel 3, stride 1, zero same-padding: channels
// 3 -> 32 -> 32 -> 32 -> 3. The first three layers carry a channel
// layer norm and tanh; the last layer is conv + tanh only.
struct GazeEncoderParams {
    nn::Tensor conv_w[4];  // [Cout, Cin, 3]
    nn::Tensor conv_b[4];  // [Cout]
    nn::Tensor ln_gamma[3], ln_beta[3];  // [32]
};

GazeEncoderParams make_gaze_encoder(Rng& rng, int hidden_channels = 32);

// g_dct [3, 1, L] -> f_gaze [3, 1, L].
nn::Tensor gaze_encode(const GazeEncoderParams& p, const nn::Tensor& g_dct);

void collect_gaze_encoder(const GazeEncoderParams& p, const std::string& prefix, nn::ParamList& out);

}  // namespace gmd
