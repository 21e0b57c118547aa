#ifndef TPAT_SYNTH_HPP_
#define TPAT_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tpat/box.hpp"
#include "tpat/image_io.hpp"

namespace tpat {

// Inclusive frame interval during which an occluder covers the target.
// Full coverage hides the whole box (ground truth marked absent); partial
// coverage hides 60% of it.
struct OccluderSpec {
    int start = 0;
    int end = 0;
    bool full = true;
};

// Everything is derived deterministically from the seeds: background,
// textures, motion, distractor paths and per-frame noise.
struct SynthConfig {
    int frame_w = 320, frame_h = 320;
    int num_frames = 60;
    float target_w = 64.f, target_h = 64.f;
    std::uint64_t texture_seed = 7;
    float vx = 1.5f, vy = 0.8f;          // linear velocity, px/frame
    float jitter_amp = 3.f;              // sinusoidal jitter amplitude, px
    float jitter_period = 17.f;          // jitter period, frames
    float scale_drift = 0.f;             // relative size change per frame
    int distractor_count = 2;
    float distractor_similarity = 0.5f;  // 0 unrelated .. 1 identical texture
    std::vector<OccluderSpec> occlusions;
    float noise = 0.02f;
    std::uint64_t seed = 1;
};

void validate(const SynthConfig& cfg);

// True target box at a frame (defined even while occluded).
BBox synth_target_box(const SynthConfig& cfg, int frame);

// Whether the target is fully occluded (ground truth absent) at a frame.
bool synth_fully_occluded(const SynthConfig& cfg, int frame);

// Renders one frame. with_target=false is the audit hook: it composites the
// identical scene without the target layer.
Image synth_render(const SynthConfig& cfg, int frame, bool with_target = true);

// Ground-truth line per frame; fully-occluded frames carry zero extents.
std::vector<BBox> synth_ground_truth(const SynthConfig& cfg);

// Writes zero-padded numbered PPM frames plus groundtruth.txt.
void synth_write(const SynthConfig& cfg, const std::string& out_dir);

}  // namespace tpat

#endif  // TPAT_SYNTH_HPP_
