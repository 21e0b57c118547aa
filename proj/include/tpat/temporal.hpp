#ifndef TPAT_TEMPORAL_HPP_
#define TPAT_TEMPORAL_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tpat/box.hpp"
#include "tpat/image_io.hpp"
#include "tpat/tensor.hpp"

namespace tpat {

struct TrackerConfig {
    float alpha = 0.7f;        // smoothing factor
    float theta_d = 0.5f;      // displacement threshold, fraction of prev diagonal
    float theta_s = 2.0f;      // size-ratio threshold
    int update_interval = 10;  // frames between dynamic updates
    float conf_th = 0.6f;      // confidence gate for updates
    bool enable_smoothing = true;
    bool enable_correction = true;
    // Optional symmetric gate on shrinkage (r < 1/theta_s). The growth test
    // is always one-sided, matching the correction rule proper.
    bool check_shrink = false;
};

// A stored template: extracted features plus where they came from.
struct TemplateEntry {
    FeatureMap features;
    BBox source_box;
    long source_frame = -1;
};

// One frozen static slot plus a fixed number of dynamic FIFO slots
// (oldest first).
class TemplateBank {
public:
    void init(TemplateEntry first, int dynamic_slots);
    const TemplateEntry& static_slot() const { return t1_; }
    const std::vector<TemplateEntry>& dynamic_slots() const { return dynamic_; }
    int slot_count() const { return 1 + static_cast<int>(dynamic_.size()); }

    // All slot feature maps, static first.
    std::vector<FeatureMap> slot_features() const;

    // Drops the oldest dynamic slot and appends `e`.
    void shift_in(TemplateEntry e);
    // Overwrites every dynamic slot with `e` (correction reset).
    void overwrite_dynamic(const TemplateEntry& e);

private:
    TemplateEntry t1_;
    std::vector<TemplateEntry> dynamic_;
};

// The three per-frame stages run in this order; the state machine throws
// on out-of-order calls.
enum class TemporalPhase { kSmooth, kCorrect, kUpdate };

struct TrackerState {
    std::optional<BBox> s_prev;    // previous output box
    std::optional<BBox> s_stable;  // last accepted box
    long frame_index = 1;          // frame being processed; 0 is the init frame
    TemplateBank bank;
    TemporalPhase phase = TemporalPhase::kSmooth;
};

// Produces a template entry for (frame, box), or nullopt when extraction is
// impossible; the bank is left untouched in that case. `frame` may be null
// for extractors that do not need pixels (tests).
using TemplateExtractor =
    std::function<std::optional<TemplateEntry>(const Image* frame, const BBox& box)>;

// Exponential blend with the previous output box; first frame passes
// through unchanged.
BBox smooth_box(const BBox& y_i, TrackerState& st, const TrackerConfig& cfg);

// Rejects implausible jumps in center or area. On rejection the last stable
// box (or the previous box) is reinstated and every dynamic slot is
// re-extracted at the reinstated box. Always records the returned box as
// the next frame's previous box.
BBox correct_box(const BBox& y_is, const Image* frame, const TemplateExtractor& extract,
                 TrackerState& st, const TrackerConfig& cfg);

// Every update_interval-th frame with confident output, shifts a freshly
// extracted template into the dynamic FIFO. Advances the frame index.
void update_templates(const Image* frame, const BBox& y_ic, float conf,
                      const TemplateExtractor& extract, TrackerState& st,
                      const TrackerConfig& cfg);

// Text snapshot: frame index, boxes, per-slot provenance.
std::string state_snapshot(const TrackerState& st);

}  // namespace tpat

#endif  // TPAT_TEMPORAL_HPP_
