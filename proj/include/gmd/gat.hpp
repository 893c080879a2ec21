// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "gmd/nn.hpp"

namespace gmd {

// Spatio-temporal graph attention on [C, N, M] tensors: C channels, N joints,
// M temporal slots. The graph is fully connected; a temporal layer attends
// over the M slots (per-node feature is the flattened [C, N] slab), a spatial
// layer attends over the N joints (feature [C, M]).

enum class GatAxis { temporal, spatial };

struct GatLayerParams {
    nn::Tensor attn;  // [heads, 2 * feat]: per head, source half then destination half
    GatAxis axis = GatAxis::temporal;
    int heads = 8;
    int feat = 0;  // per-node feature size the layer was built for
    double leaky_slope = 0.2;
};

GatLayerParams make_gat_layer(GatAxis axis, int heads, int feat, double leaky_slope, Rng& rng);

// Attention + head-averaged aggregation + LeakyReLU; shape preserved.
nn::Tensor gat_layer(const GatLayerParams& p, const nn::Tensor& x);

// Row-stochastic attention matrix of one head (diagnostics/tests).
nn::Tensor gat_attention_matrix(const GatLayerParams& p, const nn::Tensor& x, int head);

enum class BlockKind { start, middle, end };
enum class MiddleHalving { keep_first, average };

struct GatBlockParams {
    BlockKind kind = BlockKind::start;
    GatLayerParams temporal;
    GatLayerParams spatial;
    nn::Tensor lin_w;  // [C_out, C_in]
    nn::Tensor lin_b;  // [C_out]
    nn::Tensor ln_gamma, ln_beta;  // [C_out]; middle/end blocks only
    double dropout_rate = 0.0;
    MiddleHalving halving = MiddleHalving::keep_first;
};

// Block constructors need the node count N and temporal length L the block
// will run at, since attention vector sizes depend on both.
GatBlockParams make_start_block(int c_in, int c_out, int nodes, int len, int heads, double slope, Rng& rng);
GatBlockParams make_middle_block(int channels, int nodes, int len, int heads, double slope,
                                 double dropout_rate, MiddleHalving halving, Rng& rng);
GatBlockParams make_end_block(int c_in, int c_out, int nodes, int len, int heads, double slope,
                              double dropout_rate, Rng& rng);

nn::Tensor gat_block(const GatBlockParams& p, const nn::Tensor& x, Rng* rng, bool training);

// start -> middles -> end.
struct GatEncoderParams {
    GatBlockParams start;
    std::vector<GatBlockParams> middle;
    GatBlockParams end;
};

GatEncoderParams make_gat_encoder(int nodes, int len, int middle_blocks, int heads, double slope,
                                  double dropout_rate, MiddleHalving halving, Rng& rng);

nn::Tensor gat_encode(const GatEncoderParams& p, const nn::Tensor& x, Rng* rng, bool training);

// Concatenate the gaze feature as a virtual joint (node 0) ahead of the j
// motion nodes and run the fusion encoder.
nn::Tensor fuse_gaze_motion(const GatEncoderParams& fusion, const nn::Tensor& f_gaze,
                            const nn::Tensor& f_motion, Rng* rng, bool training);

void collect_gat_layer(const GatLayerParams& p, const std::string& prefix, nn::ParamList& out);
void collect_gat_block(const GatBlockParams& p, const std::string& prefix, nn::ParamList& out);
void collect_gat_encoder(const GatEncoderParams& p, const std::string& prefix, nn::ParamList& out);

}  // namespace gmd
