#include "tpat/fusion.hpp"

#include "tpat/errors.hpp"

namespace tpat {

FusionParams make_fusion_params(std::uint64_t seed, int template_count, CombineMode combine,
                                float gamma) {
    const int kv_dim = combine == CombineMode::kConcat ? template_count * 192 : 192;
    FusionParams p;
    p.attn = make_attention_params(seed, "fusion.attn", 6, 192, kv_dim);
    p.mod = make_modulation_params(seed, "fusion.mod", 192, gamma);
    p.combine = combine;
    return p;
}

FeatureMap build_template_kv(const TemplateFeatures& t) {
    if (t.slots.empty()) throw DimensionError("template bank has no slots");
    return concat_channels(t.slots);
}

FeatureMap combine_templates(const TemplateFeatures& t, CombineMode mode) {
    if (mode == CombineMode::kConcat) return build_template_kv(t);
    if (t.slots.empty()) throw DimensionError("template bank has no slots");
    FeatureMap acc = t.slots[0];
    for (size_t i = 1; i < t.slots.size(); ++i) {
        if (!t.slots[i].t.same_shape(acc.t))
            throw DimensionError("template slot shape mismatch: " +
                                 shape_str(t.slots[i].t.shape()) + " vs " +
                                 shape_str(acc.t.shape()));
        for (std::int64_t j = 0; j < acc.t.numel(); ++j)
            acc.t.data()[j] += t.slots[i].t.data()[j];
    }
    if (mode == CombineMode::kMean) {
        const float inv = 1.f / static_cast<float>(t.slots.size());
        for (std::int64_t j = 0; j < acc.t.numel(); ++j) acc.t.data()[j] *= inv;
    }
    return acc;
}

FeatureMap fuse(const FeatureMap& search, const FeatureMap& kv, const FusionParams& p,
                AttentionDebug* dbg) {
    if (kv.channels() != p.attn.kv_dim)
        throw DimensionError("fusion K/V has " + std::to_string(kv.channels()) +
                             " channels, parameters expect " + std::to_string(p.attn.kv_dim));
    if (p.use_mpa) return mpa_block(search, kv, kv, 1, p.attn, p.mod, dbg);
    return pa_block(search, kv, kv, 1, p.attn, dbg);
}

FeatureMap cross_correlate(const FeatureMap& search, const FeatureMap& tmpl) {
    if (search.channels() != tmpl.channels())
        throw DimensionError("cross-correlation channel mismatch: " +
                             shape_str(search.t.shape()) + " vs " + shape_str(tmpl.t.shape()));
    const int c = search.channels(), sh = search.height(), sw = search.width();
    const int th = tmpl.height(), tw = tmpl.width();
    const int oy = th / 2, ox = tw / 2;
    const float inv = 1.f / static_cast<float>(th * tw);
    Tensor out({c, sh, sw});
#pragma omp parallel for schedule(static) if (c > 1)
    for (int ch = 0; ch < c; ++ch) {
        for (int y = 0; y < sh; ++y)
            for (int x = 0; x < sw; ++x) {
                float acc = 0.f;
                for (int i = 0; i < th; ++i) {
                    const int sy = y + i - oy;
                    if (sy < 0 || sy >= sh) continue;
                    for (int j = 0; j < tw; ++j) {
                        const int sx = x + j - ox;
                        if (sx < 0 || sx >= sw) continue;
                        acc += tmpl.t(ch, i, j) * search.t(ch, sy, sx);
                    }
                }
                out(ch, y, x) = acc * inv;
            }
    }
    return FeatureMap(std::move(out), search.stride);
}

}  // namespace tpat
