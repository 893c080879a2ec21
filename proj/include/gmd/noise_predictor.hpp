// Copyright (c) 2026 The gmd authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "gmd/nn.hpp"

namespace gmd {

// Conditioning input for the noise predictor. "none" is the classifier-free
// unconditional path: cross-attention blocks pass through unchanged and the
// step hint carries the timestep embedding alone.
struct Condition {
    std::optional<nn::Tensor> fused;  // f_fus [3, J, L] when present

    static Condition none() { return {}; }
    static Condition from(nn::Tensor f_fus) { return {std::move(f_fus)}; }
    bool is_fused() const { return fused.has_value(); }
};

struct SelfAttentionParams {
    nn::Tensor wq, bq, wk, bk, wv, bv;  // [D, D], [D]
    nn::Tensor wo, bo;                  // output projection
    int heads = 8;
};

struct CrossAttentionParams {
    nn::Tensor wq, bq, wv, bv;  // applied to the condition tokens
    nn::Tensor wk, bk;          // applied to the running tokens
    nn::Tensor ln_gamma, ln_beta;  // value norm
    int heads = 8;
    double dropout_rate = 0.2;
};

struct MlpParams {
    nn::Tensor w1, b1;  // [D, 4D]
    nn::Tensor w2, b2;  // [4D, D]
    double dropout_rate = 0.2;
};

struct PredictorBlockParams {
    SelfAttentionParams self_attn;
    CrossAttentionParams cross_attn;
    MlpParams mlp;
};

// The full noise-prediction network. Tokens are the L coefficient slots;
// each token's 3*J features are projected into a latent of width D.
struct PredictorParams {
    int nodes = 0;       // J: j body joints plus the gaze virtual joint when present
    int components = 0;  // L
    int latent = 512;    // D
    int heads = 8;
    nn::Tensor in_w, in_b;        // [3J, D], [D]
    nn::Tensor cond_w, cond_b;    // [3J, D], [D]: condition token embedding
    nn::Tensor time_w1, time_b1;  // [D, D], [D]
    nn::Tensor time_w2, time_b2;
    nn::Tensor hint_w;            // [D, 3*J*L]: step-hint condition projection
    std::vector<PredictorBlockParams> blocks;
    nn::Tensor out_w, out_b;      // [D, 3J], [3J]
};

PredictorParams make_predictor(int nodes, int components, int latent, int heads, int n_blocks,
                               double dropout_rate, Rng& rng);

// Individual stages, exposed for tests.
nn::Tensor tokenize_project(const PredictorParams& p, const nn::Tensor& y);  // [3,J,L] -> [L,D]
nn::Tensor efficient_self_attention(const SelfAttentionParams& p, const nn::Tensor& tokens);
nn::Tensor step_hint_vector(const PredictorParams& p, int t, const Condition& c);  // -> [D]
nn::Tensor cross_attention(const CrossAttentionParams& p, const nn::Tensor& tokens,
                           const nn::Tensor& cond_tokens, Rng* rng, bool training);
nn::Tensor mlp_block(const MlpParams& p, const nn::Tensor& tokens, Rng* rng, bool training);

// Full forward pass: eps_hat with the same [3, J, L] shape as the input.
nn::Tensor predict_noise(const PredictorParams& p, const nn::Tensor& y_t, const Condition& c, int t,
                         Rng* rng, bool training);

// Sinusoidal timestep embedding (plain data, not a graph node).
std::vector<double> sinusoidal_embedding(int t, int dim);

void collect_predictor(const PredictorParams& p, const std::string& prefix, nn::ParamList& out);

}  // namespace gmd
