#ifndef TPAT_TRAIN_HPP_
#define TPAT_TRAIN_HPP_

#include <cstdint>
#include <vector>

#include "tpat/pipeline.hpp"

namespace tpat {

// Plain-SGD smoke training of the head towers on synthetic sequences; all
// other weights stay at their seeded values. Samples are search crops
// jittered around the ground truth with template banks built from earlier
// frames of the same sequence.
struct SmokeTrainConfig {
    int steps = 300;
    float lr = 0.5f;
    std::vector<SynthConfig> sequences;
    std::uint64_t sample_seed = 2024;
};

// Mean loss over the final 25 steps, for monitoring.
double smoke_train_head(ModelParams& model, const RunConfig& cfg, const SmokeTrainConfig& tcfg);

// Mean per-sequence success AUC of a configuration over a suite.
double suite_success_auc(const std::vector<SynthConfig>& suite, const RunConfig& cfg,
                         const ModelParams& model);

}  // namespace tpat

#endif  // TPAT_TRAIN_HPP_
