#ifndef TPAT_PIPELINE_HPP_
#define TPAT_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tpat/backbone.hpp"
#include "tpat/fusion.hpp"
#include "tpat/head.hpp"
#include "tpat/metrics.hpp"
#include "tpat/params.hpp"
#include "tpat/synth.hpp"
#include "tpat/temporal.hpp"
#include "tpat/tpn.hpp"

namespace tpat {

enum class FusionMode { kAttention, kCrossCorrelation };

struct RunConfig {
    TrackerConfig tracker;
    FusionMode fusion = FusionMode::kAttention;
    CombineMode combine = CombineMode::kConcat;
    int template_count = 5;  // static slot plus template_count-1 dynamic
    bool temporal = true;    // false: no smoothing/correction/updates
    bool use_mpa = true;     // false: MPA blocks degrade to PA
    std::uint64_t model_seed = 42;
    int search_size = 320;
    int template_size = 80;
    float search_factor = 4.f;     // search window, times max box edge
    float template_context = 2.f;  // template crop, times max box edge
    // Modulation strength for every MPA block in the assembled model. The
    // fusion block passes template information only through the modulation
    // term, so the pipeline needs this nonzero.
    float gamma = 1.f;
    std::string params_path;  // optional trained-parameter overlay
};

void validate(const RunConfig& cfg);

struct ModelParams {
    BackboneParams backbone;
    TpnParams tpn;
    FusionParams fusion;
    HeadParams head;
};

// Seeds every weight from cfg.model_seed, then overlays any tensors found
// in cfg.params_path (if set).
ModelParams make_model_params(const RunConfig& cfg);

ParamStore model_to_store(const ModelParams& m);
void model_from_store(ModelParams& m, const ParamStore& store);

// Effective temporal configuration: with cfg.temporal == false smoothing
// and correction are disabled and the confidence gate is set unreachable.
TrackerConfig effective_tracker_config(const RunConfig& cfg);

// Template/search feature extraction shared by tracking and training.
FeatureMap search_features(const Image& crop, const ModelParams& m);
std::optional<TemplateEntry> extract_template(const Image& frame, const BBox& box,
                                              const ModelParams& m, const RunConfig& cfg,
                                              long frame_index);

// Fused map for a search crop against a template bank, honoring the fusion
// mode and combine mode.
FeatureMap fuse_features(const FeatureMap& search, const TemplateBank& bank,
                         const ModelParams& m, const RunConfig& cfg,
                         AttentionDebug* dbg = nullptr);

// One tracked sequence, one state. Frames are processed strictly in order:
// predict, smooth, correct, update.
class TrackerSession {
public:
    TrackerSession(RunConfig cfg, const ModelParams* model);

    void init(const Image& frame0, const BBox& gt0);
    BBox process_frame(const Image& frame);

    float last_conf() const { return last_conf_; }
    const TrackerState& state() const { return state_; }
    const RunConfig& config() const { return cfg_; }

private:
    RunConfig cfg_;
    const ModelParams* model_;
    TrackerConfig tcfg_;
    TrackerState state_;
    float last_conf_ = 0.f;
};

// Directory layout: zero-padded numbered .ppm/.raw frames + groundtruth.txt.
struct SequenceDir {
    std::vector<std::string> frame_paths;
    std::vector<BBox> gt;
};
SequenceDir load_sequence_dir(const std::string& dir);

// OPE tracking of a sequence directory; frame 0 echoes the ground truth.
std::vector<BBox> track_sequence(const SequenceDir& seq, const RunConfig& cfg,
                                 const ModelParams& model);

// Same, on an in-memory synthetic sequence.
SequenceResult track_synthetic(const SynthConfig& synth, const RunConfig& cfg,
                               const ModelParams& model);

}  // namespace tpat

#endif  // TPAT_PIPELINE_HPP_
