#ifndef TPAT_BACKBONE_HPP_
#define TPAT_BACKBONE_HPP_

#include <cstdint>

#include "tpat/image_io.hpp"
#include "tpat/tensor.hpp"

namespace tpat {

// Deterministic stand-in for a pretrained pyramid backbone. Each stage is a
// non-overlapping patch flatten followed by a seeded linear projection and
// tanh, so stages stay hierarchical (stage k reads stage k-1) while the
// whole thing is reproducible from one seed.
//
// Stage channels are 116 / 232 / 464 at strides 8 / 16 / 32. Stage 4 uses
// ceil-mode patching with edge replication so odd stage-3 extents (the
// 80-pixel template path) still produce a map.
struct BackboneParams {
    Tensor w1, b1;  // 116 x (3*8*8)
    Tensor w2, b2;  // 232 x (116*2*2)
    Tensor w3, b3;  // 464 x (232*2*2)
    std::uint64_t seed = 0;
};

BackboneParams make_backbone_params(std::uint64_t seed);

struct Pyramid {
    FeatureMap p2;  // 116 x H/8  x W/8
    FeatureMap p3;  // 232 x H/16 x W/16
    FeatureMap p4;  // 464 x ceil(H/32) x ceil(W/32)
};

// Image extents must be divisible by 16. Throws DimensionError otherwise.
Pyramid extract_pyramid(const Image& img, const BackboneParams& params);

}  // namespace tpat

#endif  // TPAT_BACKBONE_HPP_
