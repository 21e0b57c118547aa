#ifndef TPAT_TPN_HPP_
#define TPAT_TPN_HPP_

#include <array>
#include <cstdint>

#include "tpat/attention.hpp"
#include "tpat/backbone.hpp"
#include "tpat/tensor.hpp"

namespace tpat {

struct AdaptParams {
    Tensor w2, b2;  // 192 x 116
    Tensor w3, b3;  // 192 x 232
    Tensor w4, b4;  // 192 x 464
};

struct MpaBranchParams {
    AttentionParams attn;
    ModulationParams mod;
};

// One parameter set drives both the template and search branches (Siamese
// weight sharing). The two cross-scale branches hold independent MPA
// parameter sets; the refine stage stacks two self-PA blocks with their own
// parameters.
struct TpnParams {
    AdaptParams adapt;
    MpaBranchParams branch_low;   // keys/values from stage 2, pooling 4
    AttentionParams branch_mid;   // self attention on stage 3, pooling 2
    MpaBranchParams branch_high;  // keys/values from stage 4, pooling 1
    AttentionParams refine1, refine2;
    bool use_mpa = true;  // false degrades both MPA branches to plain PA
};

struct AdaptedFeatures {
    FeatureMap p2a, p3a, p4a;  // 192 channels each, original extents
};

TpnParams make_tpn_params(std::uint64_t seed, float gamma = 0.f);

// 1x1-projects every stage to 192 channels. Checks the pyramid's stage
// relation (stage 2 exactly twice stage 3; stage 4 is ceil(stage3 / 2)).
AdaptedFeatures adapt_features(const Pyramid& pyr, const AdaptParams& w);

// Sum of the three cross-scale branch outputs at stage-3 resolution. When
// `branches` is non-null the per-branch outputs are copied there (index
// 0 = low, 1 = mid, 2 = high), letting tests check the additivity.
FeatureMap tpn_fuse(const AdaptedFeatures& a, const TpnParams& p,
                    std::array<FeatureMap, 3>* branches = nullptr);

// Two stacked self-PA blocks, pooling 2 each.
FeatureMap tpn_refine(const FeatureMap& p3pp, const TpnParams& p);

// adapt + fuse + refine.
FeatureMap tpn_forward(const Pyramid& pyr, const TpnParams& p);

}  // namespace tpat

#endif  // TPAT_TPN_HPP_
