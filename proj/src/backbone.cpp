#include "tpat/backbone.hpp"

#include <algorithm>
#include <cmath>

#include "tpat/errors.hpp"
#include "tpat/kernels.hpp"
#include "tpat/rng.hpp"

namespace tpat {

namespace {

Tensor seeded_uniform(std::vector<int> shape, std::uint64_t seed, float bound) {
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(-bound, bound);
    return t;
}

Tensor init_projection(int out_c, int fan_in, std::uint64_t seed) {
    return seeded_uniform({out_c, fan_in}, seed, 1.f / std::sqrt(static_cast<float>(fan_in)));
}

// Patch rows: one row per output cell, channel-major patch layout. Ceil-mode
// over the input; reads past the edge replicate the last row/column.
Tensor patch_rows(const Tensor& map, int patch) {
    const int c = map.extent(0), h = map.extent(1), w = map.extent(2);
    const int oh = (h + patch - 1) / patch, ow = (w + patch - 1) / patch;
    Tensor rows({oh * ow, c * patch * patch});
#pragma omp parallel for schedule(static) if (oh > 1)
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            float* row = rows.data() + (static_cast<long>(oy) * ow + ox) * (c * patch * patch);
            int k = 0;
            for (int ch = 0; ch < c; ++ch)
                for (int py = 0; py < patch; ++py) {
                    const int y = std::min(oy * patch + py, h - 1);
                    for (int px = 0; px < patch; ++px) {
                        const int x = std::min(ox * patch + px, w - 1);
                        row[k++] = map(ch, y, x);
                    }
                }
        }
    }
    return rows;
}

FeatureMap project_stage(const Tensor& map, const Tensor& w, const Tensor& b, int patch,
                         int stride) {
    const int h = map.extent(1), wd = map.extent(2);
    const int oh = (h + patch - 1) / patch, ow = (wd + patch - 1) / patch;
    Tensor rows = patch_rows(map, patch);
    Tensor out({rows.extent(0), w.extent(0)});
    kernels::matmul_nt(rows.data(), w.data(), out.data(), rows.extent(0), rows.extent(1),
                       w.extent(0));
    const int cout = w.extent(0);
#pragma omp parallel for schedule(static) if (rows.extent(0) > 16)
    for (int r = 0; r < rows.extent(0); ++r) {
        float* o = out.data() + static_cast<long>(r) * cout;
        for (int ch = 0; ch < cout; ++ch) o[ch] = std::tanh(o[ch] + b.data()[ch]);
    }
    return unflatten_spatial(out, oh, ow, stride);
}

}  // namespace

BackboneParams make_backbone_params(std::uint64_t seed) {
    BackboneParams p;
    p.seed = seed;
    p.w1 = init_projection(116, 3 * 8 * 8, seed_from_name(seed, "backbone.w1"));
    p.b1 = Tensor({116});
    p.w2 = init_projection(232, 116 * 2 * 2, seed_from_name(seed, "backbone.w2"));
    p.b2 = Tensor({232});
    p.w3 = init_projection(464, 232 * 2 * 2, seed_from_name(seed, "backbone.w3"));
    p.b3 = Tensor({464});
    return p;
}

Pyramid extract_pyramid(const Image& img, const BackboneParams& params) {
    const int h = img.height(), w = img.width();
    if (h % 16 != 0 || w % 16 != 0)
        throw DimensionError("image extents must be divisible by 16, got " +
                             std::to_string(h) + "x" + std::to_string(w));
    Pyramid pyr;
    pyr.p2 = project_stage(img.t, params.w1, params.b1, 8, 8);
    pyr.p3 = project_stage(pyr.p2.t, params.w2, params.b2, 2, 16);
    pyr.p4 = project_stage(pyr.p3.t, params.w3, params.b3, 2, 32);
    return pyr;
}

}  // namespace tpat
