#ifndef TPAT_FUSION_HPP_
#define TPAT_FUSION_HPP_

#include <cstdint>
#include <vector>

#include "tpat/attention.hpp"
#include "tpat/tensor.hpp"

namespace tpat {

// How the template bank's feature maps are merged before acting as K/V.
enum class CombineMode { kConcat, kMean, kSum };

// Slot 0 is the static template; the rest are the dynamic slots in FIFO
// order (oldest first).
struct TemplateFeatures {
    std::vector<FeatureMap> slots;
};

struct FusionParams {
    AttentionParams attn;  // kv_dim = slots*192 for concat, 192 otherwise
    ModulationParams mod;
    bool use_mpa = true;
    CombineMode combine = CombineMode::kConcat;
};

FusionParams make_fusion_params(std::uint64_t seed, int template_count, CombineMode combine,
                                float gamma);

// Channel concatenation of the slots in order; 5 slots of 192 -> 960.
FeatureMap build_template_kv(const TemplateFeatures& t);

// Applies the configured combine mode (concat / elementwise mean / sum).
FeatureMap combine_templates(const TemplateFeatures& t, CombineMode mode);

// One MPA block with the search map as query and the combined template map
// as both key and value, no pooling. Template information enters entirely
// through the modulation term, so fusion parameters must carry a nonzero
// gamma for the output to depend on the bank.
FeatureMap fuse(const FeatureMap& search, const FeatureMap& kv, const FusionParams& p,
                AttentionDebug* dbg = nullptr);

// Baseline combiner for the ablation harness: depthwise cross-correlation
// of one template map over the search map, zero-padded to the search
// extent and normalized by the template pixel count.
FeatureMap cross_correlate(const FeatureMap& search, const FeatureMap& tmpl);

}  // namespace tpat

#endif  // TPAT_FUSION_HPP_
