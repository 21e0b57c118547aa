#ifndef TPAT_ATTENTION_HPP_
#define TPAT_ATTENTION_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "tpat/tensor.hpp"

namespace tpat {

// Multi-head pooling attention block parameters. kv_dim may exceed model_dim
// (the template-bank fusion path feeds 960-channel keys/values); the K/V
// projections absorb the difference.
struct AttentionParams {
    int heads = 6;
    int model_dim = 192;
    int kv_dim = 192;
    Tensor wq;                    // model_dim x model_dim
    Tensor wk, wv;                // model_dim x kv_dim
    Tensor wo;                    // model_dim x model_dim
    Tensor ffn_w1, ffn_b1;        // 4*model_dim x model_dim
    Tensor ffn_w2, ffn_b2;        // model_dim x 4*model_dim
    Tensor ln1_scale, ln1_shift;  // model_dim
    Tensor ln2_scale, ln2_shift;  // model_dim
};

// Channel-attention modulation on top of a PA block. gamma scales the whole
// modulation term; zero leaves the block's input untouched.
struct ModulationParams {
    Tensor wz, bz;        // model_dim x 2*model_dim
    Tensor fc1_w, fc1_b;  // model_dim/4 x model_dim
    Tensor fc2_w, fc2_b;  // model_dim x model_dim/4
    float gamma = 0.f;
};

// Debug hook: filled with the per-head attention weight rows (post-softmax)
// and raw logits of the last multi_head_attention call that received it.
struct AttentionDebug {
    std::vector<Tensor> head_weights;  // each Nq x Nk
    std::vector<Tensor> head_logits;   // each Nq x Nk
};

AttentionParams make_attention_params(std::uint64_t seed, std::string_view name, int heads = 6,
                                      int model_dim = 192, int kv_dim = 192);
ModulationParams make_modulation_params(std::uint64_t seed, std::string_view name,
                                        int model_dim = 192, float gamma = 0.f);

// Scaled dot-product attention over token rows; scale is 1/sqrt(head_dim).
Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            const AttentionParams& p, AttentionDebug* dbg = nullptr);

// Pooling attention: keys/values spatially pooled by r, then post-norm
// transformer block (LayerNorm after each residual add). Output keeps the
// query map's spatial extent.
FeatureMap pa_block(const FeatureMap& q_map, const FeatureMap& k_map, const FeatureMap& v_map,
                    int r, const AttentionParams& p, AttentionDebug* dbg = nullptr);

// Modulated pooling attention: y = PA(x,k,v); z = conv1x1(concat(x,y));
// w = fc2(relu(fc1(avgpool(y)))); out = x + gamma * (z * w) with w broadcast
// over space. gamma == 0 returns x bit-identically.
FeatureMap mpa_block(const FeatureMap& x_map, const FeatureMap& k_map, const FeatureMap& v_map,
                     int r, const AttentionParams& p, const ModulationParams& m,
                     AttentionDebug* dbg = nullptr);

// Row-wise layer norm over channels with learned affine, eps 1e-5.
Tensor layer_norm_rows(const Tensor& x, const Tensor& scale, const Tensor& shift);

}  // namespace tpat

#endif  // TPAT_ATTENTION_HPP_
