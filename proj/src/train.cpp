#include "tpat/train.hpp"

#include <algorithm>
#include <map>

#include "tpat/errors.hpp"
#include "tpat/rng.hpp"

namespace tpat {

namespace {

constexpr int kStride3 = 16;

// Template features for (sequence, frame) at the ground-truth box, cached
// because bank entries repeat across samples.
class TemplateCache {
public:
    TemplateCache(const std::vector<SynthConfig>& seqs, const ModelParams& model,
                  const RunConfig& cfg)
        : seqs_(seqs), model_(model), cfg_(cfg) {}

    const TemplateEntry& at(int seq, int frame) {
        const auto key = std::make_pair(seq, frame);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const SynthConfig& sc = seqs_[static_cast<size_t>(seq)];
        const Image img = synth_render(sc, frame);
        auto entry = extract_template(img, synth_target_box(sc, frame), model_, cfg_, frame);
        if (!entry) throw ExtractionError("training template extraction failed");
        return cache_.emplace(key, std::move(*entry)).first->second;
    }

private:
    const std::vector<SynthConfig>& seqs_;
    const ModelParams& model_;
    const RunConfig& cfg_;
    std::map<std::pair<int, int>, TemplateEntry> cache_;
};

}  // namespace

double smoke_train_head(ModelParams& model, const RunConfig& cfg, const SmokeTrainConfig& tcfg) {
    if (tcfg.sequences.empty()) throw ConfigError("smoke training needs sequences");
    TemplateCache templates(tcfg.sequences, model, cfg);
    Rng rng(tcfg.sample_seed);
    const LossWeights weights;

    double tail_loss = 0.0;
    int tail_count = 0;
    for (int step = 0; step < tcfg.steps; ++step) {
        const int seq = rng.uniform_int(0, static_cast<int>(tcfg.sequences.size()) - 1);
        const SynthConfig& sc = tcfg.sequences[static_cast<size_t>(seq)];

        // A visible frame past the first.
        int frame = rng.uniform_int(1, sc.num_frames - 1);
        for (int guard = 0; synth_fully_occluded(sc, frame) && guard < 64; ++guard)
            frame = rng.uniform_int(1, sc.num_frames - 1);
        if (synth_fully_occluded(sc, frame)) continue;

        const BBox gt = synth_target_box(sc, frame);

        // Bank: static slot from frame 0, dynamic slots from earlier frames
        // spaced one update interval apart (most recent last).
        TrackerState state;
        state.bank.init(templates.at(seq, 0), cfg.template_count - 1);
        const int interval = std::max(1, cfg.tracker.update_interval);
        for (int d = cfg.template_count - 2; d >= 0; --d) {
            int src = frame - (d + 1) * interval;
            while (src > 0 && synth_fully_occluded(sc, src)) --src;
            if (src > 0) state.bank.shift_in(templates.at(seq, src));
        }

        // Jittered search crop around the truth.
        const float side =
            cfg.search_factor * std::max(gt.w, gt.h) * rng.uniform(0.9f, 1.1f);
        const float jx = rng.uniform(-0.12f, 0.12f) * side;
        const float jy = rng.uniform(-0.12f, 0.12f) * side;
        const Image frame_img = synth_render(sc, frame);
        Image crop;
        try {
            crop = crop_resize(frame_img, gt.cx() + jx, gt.cy() + jy, side, cfg.search_size);
        } catch (const ExtractionError&) {
            continue;
        }

        const float scale = static_cast<float>(cfg.search_size) / side;
        const BBox gt_crop{(gt.x - (gt.cx() + jx - side / 2)) * scale,
                           (gt.y - (gt.cy() + jy - side / 2)) * scale, gt.w * scale,
                           gt.h * scale};

        const FeatureMap feats = search_features(crop, model);
        const FeatureMap fused = fuse_features(feats, state.bank, model, cfg);
        LossResult loss = total_loss(fused, model.head, kStride3, gt_crop, weights);
        apply_gradient_step(model.head, loss.grad, tcfg.lr);

        if (step >= tcfg.steps - 25) {
            tail_loss += loss.total;
            ++tail_count;
        }
    }
    return tail_count > 0 ? tail_loss / tail_count : 0.0;
}

double suite_success_auc(const std::vector<SynthConfig>& suite, const RunConfig& cfg,
                         const ModelParams& model) {
    if (suite.empty()) throw ConfigError("empty evaluation suite");
    double sum = 0.0;
    for (const SynthConfig& sc : suite) {
        const SequenceResult result = track_synthetic(sc, cfg, model);
        sum += success_curve(result).auc;
    }
    return sum / static_cast<double>(suite.size());
}

}  // namespace tpat
