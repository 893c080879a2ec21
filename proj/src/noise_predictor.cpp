// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#include "gmd/noise_predictor.hpp"

#include <cmath>

#include "gmd/errors.hpp"

namespace gmd {

using nn::Tensor;

namespace {

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    return nn::add_rows(nn::matmul(x, w), b);
}

void init_linear(Tensor& w, Tensor& b, int fan_in, int fan_out, Rng& rng) {
    w = nn::parameter({fan_in, fan_out});
    nn::glorot_init(w, fan_in, fan_out, rng);
    b = nn::parameter({fan_out});
}

}  // namespace

PredictorParams make_predictor(int nodes, int components, int latent, int heads, int n_blocks,
                               double dropout_rate, Rng& rng) {
    if (latent % heads != 0) throw ValidationError("predictor: latent dim must divide by heads");
    PredictorParams p;
    p.nodes = nodes;
    p.components = components;
    p.latent = latent;
    p.heads = heads;
    const int token_feat = 3 * nodes;

    init_linear(p.in_w, p.in_b, token_feat, latent, rng);
    init_linear(p.cond_w, p.cond_b, token_feat, latent, rng);
    init_linear(p.time_w1, p.time_b1, latent, latent, rng);
    init_linear(p.time_w2, p.time_b2, latent, latent, rng);
    p.hint_w = nn::parameter({latent, token_feat * components});
    nn::glorot_init(p.hint_w, token_feat * components, latent, rng);

    for (int i = 0; i < n_blocks; ++i) {
        PredictorBlockParams blk;
        blk.self_attn.heads = heads;
        init_linear(blk.self_attn.wq, blk.self_attn.bq, latent, latent, rng);
        init_linear(blk.self_attn.wk, blk.self_attn.bk, latent, latent, rng);
        init_linear(blk.self_attn.wv, blk.self_attn.bv, latent, latent, rng);
        init_linear(blk.self_attn.wo, blk.self_attn.bo, latent, latent, rng);

        blk.cross_attn.heads = heads;
        blk.cross_attn.dropout_rate = dropout_rate;
        init_linear(blk.cross_attn.wq, blk.cross_attn.bq, latent, latent, rng);
        init_linear(blk.cross_attn.wv, blk.cross_attn.bv, latent, latent, rng);
        init_linear(blk.cross_attn.wk, blk.cross_attn.bk, latent, latent, rng);
        blk.cross_attn.ln_gamma = nn::parameter({latent});
        std::fill(blk.cross_attn.ln_gamma.values().begin(), blk.cross_attn.ln_gamma.values().end(), 1.0);
        blk.cross_attn.ln_beta = nn::parameter({latent});

        blk.mlp.dropout_rate = dropout_rate;
        init_linear(blk.mlp.w1, blk.mlp.b1, latent, 4 * latent, rng);
        init_linear(blk.mlp.w2, blk.mlp.b2, 4 * latent, latent, rng);
        p.blocks.push_back(std::move(blk));
    }
    init_linear(p.out_w, p.out_b, latent, token_feat, rng);
    return p;
}

Tensor tokenize_project(const PredictorParams& p, const Tensor& y) {
    if (y.shape().size() != 3 || y.dim(0) != 3 || y.dim(1) != p.nodes || y.dim(2) != p.components) {
        throw ValidationError("tokenize_project: input must be [3, J, L] for the configured model");
    }
    Tensor tokens = nn::reshape(nn::permute(y, {2, 0, 1}), {p.components, 3 * p.nodes});
    return linear(tokens, p.in_w, p.in_b);
}

namespace {

std::vector<Tensor> split_heads(const Tensor& x, int heads) {
    const int d_head = x.dim(1) / heads;
    std::vector<Tensor> parts;
    parts.reserve(heads);
    for (int h = 0; h < heads; ++h) parts.push_back(nn::slice(x, 1, h * d_head, d_head));
    return parts;
}

}  // namespace

Tensor efficient_self_attention(const SelfAttentionParams& p, const Tensor& tokens) {
    Tensor q = linear(tokens, p.wq, p.bq);
    Tensor k = linear(tokens, p.wk, p.bk);
    Tensor v = linear(tokens, p.wv, p.bv);

    auto qh = split_heads(q, p.heads);
    auto kh = split_heads(k, p.heads);
    auto vh = split_heads(v, p.heads);
    std::vector<Tensor> outs;
    outs.reserve(p.heads);
    for (int h = 0; h < p.heads; ++h) {
        // softmax over features per token applied to Q; softmax over tokens
        // per feature applied to K; contracted against V first so the cost
        // stays linear in L.
        Tensor ctx = nn::matmul(nn::transpose(nn::softmax_cols(kh[h])), vh[h]);  // [d,d]
        outs.push_back(nn::matmul(nn::softmax_rows(qh[h]), ctx));                // [L,d]
    }
    Tensor merged = nn::concat(outs, 1);
    return nn::add(linear(merged, p.wo, p.bo), tokens);
}

std::vector<double> sinusoidal_embedding(int t, int dim) {
    std::vector<double> e(dim, 0.0);
    const int half = dim / 2;
    for (int i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * (2.0 * i / dim));
        e[2 * i] = std::sin(t * freq);
        e[2 * i + 1] = std::cos(t * freq);
    }
    return e;
}

Tensor step_hint_vector(const PredictorParams& p, int t, const Condition& c) {
    Tensor emb = Tensor::from({1, p.latent}, sinusoidal_embedding(t, p.latent));
    Tensor e_t = linear(nn::gelu(linear(emb, p.time_w1, p.time_b1)), p.time_w2, p.time_b2);
    Tensor e = nn::reshape(e_t, {p.latent});
    if (c.is_fused()) {
        Tensor c_flat = nn::reshape(*c.fused, {3 * p.nodes * p.components});
        e = nn::add(e, nn::matvec(p.hint_w, c_flat));
    }
    return e;
}

Tensor cross_attention(const CrossAttentionParams& p, const Tensor& tokens, const Tensor& cond_tokens,
                       Rng* rng, bool training) {
    Tensor q = linear(cond_tokens, p.wq, p.bq);
    Tensor v = linear(cond_tokens, p.wv, p.bv);
    Tensor k = linear(tokens, p.wk, p.bk);
    Tensor v_norm = nn::layer_norm(v, p.ln_gamma, p.ln_beta);

    auto qh = split_heads(q, p.heads);
    auto kh = split_heads(k, p.heads);
    auto vh = split_heads(v_norm, p.heads);
    std::vector<Tensor> outs;
    outs.reserve(p.heads);
    for (int h = 0; h < p.heads; ++h) {
        Tensor attn = nn::matmul(nn::softmax_rows(qh[h]), nn::transpose(nn::softmax_cols(kh[h])));
        attn = nn::dropout(attn, p.dropout_rate, rng, training);
        outs.push_back(nn::matmul(attn, vh[h]));
    }
    return nn::add(nn::concat(outs, 1), tokens);
}

Tensor mlp_block(const MlpParams& p, const Tensor& tokens, Rng* rng, bool training) {
    Tensor h = nn::gelu(linear(tokens, p.w1, p.b1));
    h = nn::dropout(h, p.dropout_rate, rng, training);
    return nn::add(linear(h, p.w2, p.b2), tokens);
}

Tensor predict_noise(const PredictorParams& p, const Tensor& y_t, const Condition& c, int t, Rng* rng,
                     bool training) {
    Tensor tokens = tokenize_project(p, y_t);
    Tensor hint = step_hint_vector(p, t, c);
    Tensor cond_tokens;
    if (c.is_fused()) {
        Tensor raw = nn::reshape(nn::permute(*c.fused, {2, 0, 1}), {p.components, 3 * p.nodes});
        cond_tokens = linear(raw, p.cond_w, p.cond_b);
    }
    for (const auto& blk : p.blocks) {
        tokens = efficient_self_attention(blk.self_attn, tokens);
        tokens = nn::add_rows(tokens, hint);
        if (c.is_fused()) {
            tokens = cross_attention(blk.cross_attn, tokens, cond_tokens, rng, training);
        }
        tokens = mlp_block(blk.mlp, tokens, rng, training);
    }
    Tensor out = linear(tokens, p.out_w, p.out_b);  // [L, 3J]
    return nn::permute(nn::reshape(out, {p.components, 3, p.nodes}), {1, 2, 0});
}

void collect_predictor(const PredictorParams& p, const std::string& prefix, nn::ParamList& out) {
    auto push = [&out](const std::string& name, const Tensor& t) { out.push_back({name, t}); };
    push(prefix + ".in_w", p.in_w);
    push(prefix + ".in_b", p.in_b);
    push(prefix + ".cond_w", p.cond_w);
    push(prefix + ".cond_b", p.cond_b);
    push(prefix + ".time_w1", p.time_w1);
    push(prefix + ".time_b1", p.time_b1);
    push(prefix + ".time_w2", p.time_w2);
    push(prefix + ".time_b2", p.time_b2);
    push(prefix + ".hint_w", p.hint_w);
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        const auto& blk = p.blocks[i];
        const std::string base = prefix + ".block" + std::to_string(i);
        push(base + ".sa.wq", blk.self_attn.wq);
        push(base + ".sa.bq", blk.self_attn.bq);
        push(base + ".sa.wk", blk.self_attn.wk);
        push(base + ".sa.bk", blk.self_attn.bk);
        push(base + ".sa.wv", blk.self_attn.wv);
        push(base + ".sa.bv", blk.self_attn.bv);
        push(base + ".sa.wo", blk.self_attn.wo);
        push(base + ".sa.bo", blk.self_attn.bo);
        push(base + ".ca.wq", blk.cross_attn.wq);
        push(base + ".ca.bq", blk.cross_attn.bq);
        push(base + ".ca.wv", blk.cross_attn.wv);
        push(base + ".ca.bv", blk.cross_attn.bv);
        push(base + ".ca.wk", blk.cross_attn.wk);
        push(base + ".ca.bk", blk.cross_attn.bk);
        push(base + ".ca.ln_gamma", blk.cross_attn.ln_gamma);
        push(base + ".ca.ln_beta", blk.cross_attn.ln_beta);
        push(base + ".mlp.w1", blk.mlp.w1);
        push(base + ".mlp.b1", blk.mlp.b1);
        push(base + ".mlp.w2", blk.mlp.w2);
        push(base + ".mlp.b2", blk.mlp.b2);
    }
    push(prefix + ".out_w", p.out_w);
    push(prefix + ".out_b", p.out_b);
}

}  // namespace gmd
