// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#include "gmd/gat.hpp"

#include "gmd/errors.hpp"

namespace gmd {

using nn::Tensor;

namespace {

// Node-feature matrix for the chosen axis: temporal -> [M, C*N],
// spatial -> [N, C*M].
Tensor node_features(GatAxis axis, const Tensor& x) {
    const int c = x.dim(0), n = x.dim(1), m = x.dim(2);
    if (axis == GatAxis::temporal) {
        return nn::reshape(nn::permute(x, {2, 0, 1}), {m, c * n});
    }
    return nn::reshape(nn::permute(x, {1, 0, 2}), {n, c * m});
}

Tensor features_to_tensor(GatAxis axis, const Tensor& h, int c, int n, int m) {
    if (axis == GatAxis::temporal) {
        return nn::permute(nn::reshape(h, {m, c, n}), {1, 2, 0});
    }
    return nn::permute(nn::reshape(h, {n, c, m}), {1, 0, 2});
}

// Attention scores of one head: softmax_k(LeakyReLU(a . [h_i (+) h_k])).
// The concatenated dot product splits into a source and a destination half.
Tensor head_attention(const GatLayerParams& p, const Tensor& feats, int head) {
    const int feat = p.feat;
    Tensor row = nn::reshape(nn::slice(p.attn, 0, head, 1), {2 * feat});
    Tensor a_src = nn::slice(row, 0, 0, feat);
    Tensor a_dst = nn::slice(row, 0, feat, feat);
    Tensor u = nn::matvec(feats, a_src);
    Tensor v = nn::matvec(feats, a_dst);
    Tensor scores = nn::leaky_relu(nn::cross_add(u, v), p.leaky_slope);
    return nn::softmax_rows(scores);
}

void check_layer(const GatLayerParams& p, const Tensor& x) {
    const int c = x.dim(0), n = x.dim(1), m = x.dim(2);
    const int feat = p.axis == GatAxis::temporal ? c * n : c * m;
    if (feat != p.feat) {
        throw ValidationError("gat_layer: per-node feature size " + std::to_string(feat) +
                              " does not match layer built for " + std::to_string(p.feat));
    }
}

}  // namespace

GatLayerParams make_gat_layer(GatAxis axis, int heads, int feat, double leaky_slope, Rng& rng) {
    GatLayerParams p;
    p.axis = axis;
    p.heads = heads;
    p.feat = feat;
    p.leaky_slope = leaky_slope;
    p.attn = nn::parameter({heads, 2 * feat});
    nn::glorot_init(p.attn, 2 * feat, 1, rng);
    return p;
}

Tensor gat_layer(const GatLayerParams& p, const Tensor& x) {
    if (x.shape().size() != 3) throw ValidationError("gat_layer: input must be [C,N,M]");
    check_layer(p, x);
    const int c = x.dim(0), n = x.dim(1), m = x.dim(2);

    Tensor feats = node_features(p.axis, x);
    // Heads share the node features, so averaging the attention matrices
    // first and aggregating once is the same sum as per-head aggregation.
    Tensor alpha = head_attention(p, feats, 0);
    for (int h = 1; h < p.heads; ++h) alpha = nn::add(alpha, head_attention(p, feats, h));
    alpha = nn::scale(alpha, 1.0 / p.heads);
    Tensor out = nn::leaky_relu(nn::matmul(alpha, feats), p.leaky_slope);
    return features_to_tensor(p.axis, out, c, n, m);
}

Tensor gat_attention_matrix(const GatLayerParams& p, const Tensor& x, int head) {
    check_layer(p, x);
    return head_attention(p, node_features(p.axis, x), head);
}

namespace {

Tensor channel_linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    const int c_in = x.dim(0), n = x.dim(1), m = x.dim(2);
    Tensor flat = nn::reshape(x, {c_in, n * m});
    Tensor y = nn::add_cols(nn::matmul(w, flat), b);
    return nn::reshape(y, {w.dim(0), n, m});
}

// LayerNorm over the channel axis per (node, slot).
Tensor norm_channels(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
    const int c = x.dim(0), n = x.dim(1), m = x.dim(2);
    Tensor rows = nn::reshape(nn::permute(x, {1, 2, 0}), {n * m, c});
    Tensor y = nn::layer_norm(rows, gamma, beta);
    return nn::permute(nn::reshape(y, {n, m, c}), {2, 0, 1});
}

}  // namespace

GatBlockParams make_start_block(int c_in, int c_out, int nodes, int len, int heads, double slope,
                                Rng& rng) {
    GatBlockParams p;
    p.kind = BlockKind::start;
    p.temporal = make_gat_layer(GatAxis::temporal, heads, c_in * nodes, slope, rng);
    p.lin_w = nn::parameter({c_out, c_in});
    nn::glorot_init(p.lin_w, c_in, c_out, rng);
    p.lin_b = nn::parameter({c_out});
    p.spatial = make_gat_layer(GatAxis::spatial, heads, c_out * len, slope, rng);
    return p;
}

GatBlockParams make_middle_block(int channels, int nodes, int len, int heads, double slope,
                                 double dropout_rate, MiddleHalving halving, Rng& rng) {
    GatBlockParams p;
    p.kind = BlockKind::middle;
    p.halving = halving;
    p.dropout_rate = dropout_rate;
    // The middle block runs on the temporally duplicated tensor [C, N, 2L].
    p.temporal = make_gat_layer(GatAxis::temporal, heads, channels * nodes, slope, rng);
    p.lin_w = nn::parameter({channels, channels});
    nn::glorot_init(p.lin_w, channels, channels, rng);
    p.lin_b = nn::parameter({channels});
    p.spatial = make_gat_layer(GatAxis::spatial, heads, channels * 2 * len, slope, rng);
    p.ln_gamma = nn::parameter({channels});
    std::fill(p.ln_gamma.values().begin(), p.ln_gamma.values().end(), 1.0);
    p.ln_beta = nn::parameter({channels});
    return p;
}

GatBlockParams make_end_block(int c_in, int c_out, int nodes, int len, int heads, double slope,
                              double dropout_rate, Rng& rng) {
    GatBlockParams p;
    p.kind = BlockKind::end;
    p.dropout_rate = dropout_rate;
    p.temporal = make_gat_layer(GatAxis::temporal, heads, c_in * nodes, slope, rng);
    p.lin_w = nn::parameter({c_out, c_in});
    nn::glorot_init(p.lin_w, c_in, c_out, rng);
    p.lin_b = nn::parameter({c_out});
    p.spatial = make_gat_layer(GatAxis::spatial, heads, c_out * len, slope, rng);
    p.ln_gamma = nn::parameter({c_out});
    std::fill(p.ln_gamma.values().begin(), p.ln_gamma.values().end(), 1.0);
    p.ln_beta = nn::parameter({c_out});
    return p;
}

Tensor gat_block(const GatBlockParams& p, const Tensor& x, Rng* rng, bool training) {
    switch (p.kind) {
        case BlockKind::start: {
            Tensor t = gat_layer(p.temporal, x);
            t = channel_linear(t, p.lin_w, p.lin_b);
            return gat_layer(p.spatial, t);
        }
        case BlockKind::middle: {
            const int len = x.dim(2);
            Tensor x2 = nn::concat({x, x}, 2);  // duplicate temporal features
            Tensor y = gat_layer(p.temporal, x2);
            y = channel_linear(y, p.lin_w, p.lin_b);
            y = gat_layer(p.spatial, y);
            y = norm_channels(y, p.ln_gamma, p.ln_beta);
            y = nn::tanh_act(y);
            y = nn::dropout(y, p.dropout_rate, rng, training);
            y = nn::add(y, x2);  // skip connection
            if (p.halving == MiddleHalving::keep_first) {
                return nn::slice(y, 2, 0, len);
            }
            Tensor first = nn::slice(y, 2, 0, len);
            Tensor second = nn::slice(y, 2, len, len);
            return nn::scale(nn::add(first, second), 0.5);
        }
        case BlockKind::end: {
            Tensor t = gat_layer(p.temporal, x);
            t = channel_linear(t, p.lin_w, p.lin_b);
            t = gat_layer(p.spatial, t);
            t = norm_channels(t, p.ln_gamma, p.ln_beta);
            t = nn::tanh_act(t);
            return nn::dropout(t, p.dropout_rate, rng, training);
        }
    }
    throw ValidationError("gat_block: bad kind");
}

GatEncoderParams make_gat_encoder(int nodes, int len, int middle_blocks, int heads, double slope,
                                  double dropout_rate, MiddleHalving halving, Rng& rng) {
    GatEncoderParams enc;
    enc.start = make_start_block(3, 16, nodes, len, heads, slope, rng);
    for (int i = 0; i < middle_blocks; ++i) {
        enc.middle.push_back(make_middle_block(16, nodes, len, heads, slope, dropout_rate, halving, rng));
    }
    enc.end = make_end_block(16, 3, nodes, len, heads, slope, dropout_rate, rng);
    return enc;
}

Tensor gat_encode(const GatEncoderParams& p, const Tensor& x, Rng* rng, bool training) {
    Tensor y = gat_block(p.start, x, rng, training);
    for (const auto& mid : p.middle) y = gat_block(mid, y, rng, training);
    return gat_block(p.end, y, rng, training);
}

Tensor fuse_gaze_motion(const GatEncoderParams& fusion, const Tensor& f_gaze, const Tensor& f_motion,
                        Rng* rng, bool training) {
    if (f_gaze.dim(2) != f_motion.dim(2)) {
        throw ValidationError("fuse_gaze_motion: temporal lengths differ");
    }
    Tensor f_in = nn::concat({f_gaze, f_motion}, 1);  // gaze is the virtual joint at node 0
    return gat_encode(fusion, f_in, rng, training);
}

void collect_gat_layer(const GatLayerParams& p, const std::string& prefix, nn::ParamList& out) {
    out.push_back({prefix + ".attn", p.attn});
}

void collect_gat_block(const GatBlockParams& p, const std::string& prefix, nn::ParamList& out) {
    collect_gat_layer(p.temporal, prefix + ".temporal", out);
    out.push_back({prefix + ".lin_w", p.lin_w});
    out.push_back({prefix + ".lin_b", p.lin_b});
    collect_gat_layer(p.spatial, prefix + ".spatial", out);
    if (p.ln_gamma.defined()) {
        out.push_back({prefix + ".ln_gamma", p.ln_gamma});
        out.push_back({prefix + ".ln_beta", p.ln_beta});
    }
}

void collect_gat_encoder(const GatEncoderParams& p, const std::string& prefix, nn::ParamList& out) {
    collect_gat_block(p.start, prefix + ".start", out);
    for (std::size_t i = 0; i < p.middle.size(); ++i) {
        collect_gat_block(p.middle[i], prefix + ".middle" + std::to_string(i), out);
    }
    collect_gat_block(p.end, prefix + ".end", out);
}

}  // namespace gmd
