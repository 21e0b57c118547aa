#include "tpat/tpn.hpp"

#include <cmath>

#include "tpat/errors.hpp"
#include "tpat/rng.hpp"

namespace tpat {

namespace {

Tensor seeded_uniform(std::vector<int> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    const float bound = 1.f / std::sqrt(static_cast<float>(t.extent(1)));
    Rng rng(seed);
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(-bound, bound);
    return t;
}

FeatureMap add_maps(const FeatureMap& a, const FeatureMap& b) {
    if (!a.t.same_shape(b.t))
        throw DimensionError("map sum shape mismatch: " + shape_str(a.t.shape()) + " vs " +
                             shape_str(b.t.shape()));
    FeatureMap out = a;
    for (std::int64_t i = 0; i < out.t.numel(); ++i) out.t.data()[i] += b.t.data()[i];
    return out;
}

FeatureMap branch_eval(const FeatureMap& x, const FeatureMap& kv, int r,
                       const MpaBranchParams& bp, bool use_mpa) {
    if (use_mpa) return mpa_block(x, kv, kv, r, bp.attn, bp.mod);
    return pa_block(x, kv, kv, r, bp.attn);
}

}  // namespace

TpnParams make_tpn_params(std::uint64_t seed, float gamma) {
    TpnParams p;
    p.adapt.w2 = seeded_uniform({192, 116}, seed_from_name(seed, "tpn.adapt.w2"));
    p.adapt.b2 = Tensor({192});
    p.adapt.w3 = seeded_uniform({192, 232}, seed_from_name(seed, "tpn.adapt.w3"));
    p.adapt.b3 = Tensor({192});
    p.adapt.w4 = seeded_uniform({192, 464}, seed_from_name(seed, "tpn.adapt.w4"));
    p.adapt.b4 = Tensor({192});
    p.branch_low.attn = make_attention_params(seed, "tpn.low.attn");
    p.branch_low.mod = make_modulation_params(seed, "tpn.low.mod", 192, gamma);
    p.branch_mid = make_attention_params(seed, "tpn.mid.attn");
    p.branch_high.attn = make_attention_params(seed, "tpn.high.attn");
    p.branch_high.mod = make_modulation_params(seed, "tpn.high.mod", 192, gamma);
    p.refine1 = make_attention_params(seed, "tpn.refine1");
    p.refine2 = make_attention_params(seed, "tpn.refine2");
    return p;
}

AdaptedFeatures adapt_features(const Pyramid& pyr, const AdaptParams& w) {
    if (pyr.p2.height() != 2 * pyr.p3.height() || pyr.p2.width() != 2 * pyr.p3.width())
        throw DimensionError("stage 2 extent " + shape_str(pyr.p2.t.shape()) +
                             " is not twice stage 3 " + shape_str(pyr.p3.t.shape()));
    if (pyr.p4.height() != (pyr.p3.height() + 1) / 2 || pyr.p4.width() != (pyr.p3.width() + 1) / 2)
        throw DimensionError("stage 4 extent " + shape_str(pyr.p4.t.shape()) +
                             " is not ceil-half of stage 3 " + shape_str(pyr.p3.t.shape()));
    AdaptedFeatures a;
    a.p2a = conv1x1(pyr.p2, w.w2, w.b2);
    a.p3a = conv1x1(pyr.p3, w.w3, w.b3);
    a.p4a = conv1x1(pyr.p4, w.w4, w.b4);
    return a;
}

FeatureMap tpn_fuse(const AdaptedFeatures& a, const TpnParams& p,
                    std::array<FeatureMap, 3>* branches) {
    FeatureMap low = branch_eval(a.p3a, a.p2a, 4, p.branch_low, p.use_mpa);
    FeatureMap mid = pa_block(a.p3a, a.p3a, a.p3a, 2, p.branch_mid);
    FeatureMap high = branch_eval(a.p3a, a.p4a, 1, p.branch_high, p.use_mpa);
    FeatureMap out = add_maps(add_maps(low, mid), high);
    if (branches) *branches = {std::move(low), std::move(mid), std::move(high)};
    return out;
}

FeatureMap tpn_refine(const FeatureMap& p3pp, const TpnParams& p) {
    FeatureMap h = pa_block(p3pp, p3pp, p3pp, 2, p.refine1);
    return pa_block(h, h, h, 2, p.refine2);
}

FeatureMap tpn_forward(const Pyramid& pyr, const TpnParams& p) {
    return tpn_refine(tpn_fuse(adapt_features(pyr, p.adapt), p), p);
}

}  // namespace tpat
