#include "tpat/attention.hpp"

#include <cmath>
#include <string>

#include "tpat/errors.hpp"
#include "tpat/rng.hpp"

namespace tpat {

namespace {

Tensor seeded_uniform(std::vector<int> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    const float bound = 1.f / std::sqrt(static_cast<float>(t.extent(t.ndim() - 1)));
    Rng rng(seed);
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(-bound, bound);
    return t;
}

Tensor add(const Tensor& a, const Tensor& b) {
    Tensor out = a;
    for (std::int64_t i = 0; i < out.numel(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Tensor relu(Tensor t) {
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = std::max(0.f, t.data()[i]);
    return t;
}

Tensor add_bias_rows(Tensor t, const Tensor& bias) {
    const int rows = t.extent(0), cols = t.extent(1);
    for (int r = 0; r < rows; ++r) {
        float* row = t.data() + static_cast<long>(r) * cols;
        for (int c = 0; c < cols; ++c) row[c] += bias.data()[c];
    }
    return t;
}

Tensor col_block(const Tensor& t, int c0, int c1) {
    const int rows = t.extent(0), cols = t.extent(1), n = c1 - c0;
    Tensor out({rows, n});
    for (int r = 0; r < rows; ++r) {
        const float* src = t.data() + static_cast<long>(r) * cols + c0;
        float* dst = out.data() + static_cast<long>(r) * n;
        for (int c = 0; c < n; ++c) dst[c] = src[c];
    }
    return out;
}

Tensor ffn(const Tensor& x, const AttentionParams& p) {
    Tensor h = relu(add_bias_rows(matmul_nt(x, p.ffn_w1), p.ffn_b1));
    return add_bias_rows(matmul_nt(h, p.ffn_w2), p.ffn_b2);
}

}  // namespace

AttentionParams make_attention_params(std::uint64_t seed, std::string_view name, int heads,
                                      int model_dim, int kv_dim) {
    if (model_dim % heads != 0)
        throw DimensionError("model_dim " + std::to_string(model_dim) +
                             " not divisible by heads " + std::to_string(heads));
    const std::string base(name);
    AttentionParams p;
    p.heads = heads;
    p.model_dim = model_dim;
    p.kv_dim = kv_dim;
    p.wq = seeded_uniform({model_dim, model_dim}, seed_from_name(seed, base + ".wq"));
    p.wk = seeded_uniform({model_dim, kv_dim}, seed_from_name(seed, base + ".wk"));
    p.wv = seeded_uniform({model_dim, kv_dim}, seed_from_name(seed, base + ".wv"));
    p.wo = seeded_uniform({model_dim, model_dim}, seed_from_name(seed, base + ".wo"));
    p.ffn_w1 = seeded_uniform({4 * model_dim, model_dim}, seed_from_name(seed, base + ".ffn_w1"));
    p.ffn_b1 = Tensor({4 * model_dim});
    p.ffn_w2 = seeded_uniform({model_dim, 4 * model_dim}, seed_from_name(seed, base + ".ffn_w2"));
    p.ffn_b2 = Tensor({model_dim});
    p.ln1_scale = Tensor({model_dim}, 1.f);
    p.ln1_shift = Tensor({model_dim});
    p.ln2_scale = Tensor({model_dim}, 1.f);
    p.ln2_shift = Tensor({model_dim});
    return p;
}

ModulationParams make_modulation_params(std::uint64_t seed, std::string_view name, int model_dim,
                                        float gamma) {
    const std::string base(name);
    const int bottleneck = model_dim / 4;
    ModulationParams m;
    m.wz = seeded_uniform({model_dim, 2 * model_dim}, seed_from_name(seed, base + ".wz"));
    m.bz = Tensor({model_dim});
    m.fc1_w = seeded_uniform({bottleneck, model_dim}, seed_from_name(seed, base + ".fc1"));
    m.fc1_b = Tensor({bottleneck});
    m.fc2_w = seeded_uniform({model_dim, bottleneck}, seed_from_name(seed, base + ".fc2"));
    m.fc2_b = Tensor({model_dim});
    m.gamma = gamma;
    return m;
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& scale, const Tensor& shift) {
    const int rows = x.extent(0), cols = x.extent(1);
    Tensor out({rows, cols});
#pragma omp parallel for schedule(static) if (rows > 16)
    for (int r = 0; r < rows; ++r) {
        const float* in = x.data() + static_cast<long>(r) * cols;
        float* o = out.data() + static_cast<long>(r) * cols;
        double mean = 0.0;
        for (int c = 0; c < cols; ++c) mean += in[c];
        mean /= cols;
        double var = 0.0;
        for (int c = 0; c < cols; ++c) {
            const double d = in[c] - mean;
            var += d * d;
        }
        var /= cols;
        const float inv = static_cast<float>(1.0 / std::sqrt(var + 1e-5));
        for (int c = 0; c < cols; ++c)
            o[c] = (static_cast<float>(in[c] - mean)) * inv * scale.data()[c] + shift.data()[c];
    }
    return out;
}

Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            const AttentionParams& p, AttentionDebug* dbg) {
    if (q.ndim() != 2 || q.extent(1) != p.model_dim)
        throw DimensionError("attention query " + shape_str(q.shape()) + " needs " +
                             std::to_string(p.model_dim) + " channels");
    if (k.shape() != v.shape())
        throw DimensionError("key/value token shapes differ: " + shape_str(k.shape()) + " vs " +
                             shape_str(v.shape()));
    if (k.extent(1) != p.kv_dim)
        throw DimensionError("key tokens " + shape_str(k.shape()) + " need " +
                             std::to_string(p.kv_dim) + " channels");

    const int nq = q.extent(0), nk = k.extent(0);
    const int head_dim = p.model_dim / p.heads;
    const float inv_scale = 1.f / std::sqrt(static_cast<float>(head_dim));

    Tensor pq = matmul_nt(q, p.wq);
    Tensor pk = matmul_nt(k, p.wk);
    Tensor pv = matmul_nt(v, p.wv);

    if (dbg) {
        dbg->head_weights.clear();
        dbg->head_logits.clear();
    }
    Tensor concat({nq, p.model_dim});
    for (int h = 0; h < p.heads; ++h) {
        const int c0 = h * head_dim, c1 = c0 + head_dim;
        Tensor qh = col_block(pq, c0, c1);
        Tensor kh = col_block(pk, c0, c1);
        Tensor vh = col_block(pv, c0, c1);
        Tensor logits = matmul_nt(qh, kh);
        for (std::int64_t i = 0; i < logits.numel(); ++i) logits.data()[i] *= inv_scale;
        Tensor weights = softmax_rows(logits);
        Tensor oh = matmul(weights, vh);
        for (int r = 0; r < nq; ++r)
            for (int c = 0; c < head_dim; ++c) concat(r, c0 + c) = oh(r, c);
        if (dbg) {
            dbg->head_logits.push_back(std::move(logits));
            dbg->head_weights.push_back(std::move(weights));
        }
    }
    return matmul_nt(concat, p.wo);
}

FeatureMap pa_block(const FeatureMap& q_map, const FeatureMap& k_map, const FeatureMap& v_map,
                    int r, const AttentionParams& p, AttentionDebug* dbg) {
    if (q_map.channels() != p.model_dim)
        throw DimensionError("pa_block query map " + shape_str(q_map.t.shape()) + " needs " +
                             std::to_string(p.model_dim) + " channels");
    FeatureMap pooled_k = spatial_pool(k_map, r);
    FeatureMap pooled_v = spatial_pool(v_map, r);
    Tensor q_tok = flatten_spatial(q_map);
    Tensor k_tok = flatten_spatial(pooled_k);
    Tensor v_tok = flatten_spatial(pooled_v);

    Tensor attn = multi_head_attention(q_tok, k_tok, v_tok, p, dbg);
    Tensor h1 = layer_norm_rows(add(q_tok, attn), p.ln1_scale, p.ln1_shift);
    Tensor h2 = layer_norm_rows(add(h1, ffn(h1, p)), p.ln2_scale, p.ln2_shift);
    return unflatten_spatial(h2, q_map.height(), q_map.width(), q_map.stride);
}

FeatureMap mpa_block(const FeatureMap& x_map, const FeatureMap& k_map, const FeatureMap& v_map,
                     int r, const AttentionParams& p, const ModulationParams& m,
                     AttentionDebug* dbg) {
    // gamma scales the entire modulation term; zero is the exact residual
    // endpoint, returned as-is.
    if (m.gamma == 0.f) return x_map;

    FeatureMap y = pa_block(x_map, k_map, v_map, r, p, dbg);
    std::vector<FeatureMap> xy;
    xy.push_back(x_map);
    xy.push_back(y);
    FeatureMap z = conv1x1(concat_channels(xy), m.wz, m.bz);

    Tensor pooled = adaptive_avg_pool(y);
    Tensor w = linear(relu(linear(pooled, m.fc1_w, m.fc1_b)), m.fc2_w, m.fc2_b);

    const int c = x_map.channels(), npx = x_map.height() * x_map.width();
    Tensor out({c, x_map.height(), x_map.width()});
    const float* xd = x_map.t.data();
    const float* zd = z.t.data();
    for (int ch = 0; ch < c; ++ch) {
        const float wc = m.gamma * w.data()[ch];
        for (int px = 0; px < npx; ++px) {
            const long i = static_cast<long>(ch) * npx + px;
            out.data()[i] = xd[i] + wc * zd[i];
        }
    }
    return FeatureMap(std::move(out), x_map.stride);
}

}  // namespace tpat
