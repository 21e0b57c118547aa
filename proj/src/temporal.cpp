#include "tpat/temporal.hpp"

#include <sstream>

#include "tpat/errors.hpp"

namespace tpat {

void TemplateBank::init(TemplateEntry first, int dynamic_slots) {
    if (dynamic_slots < 0) throw ConfigError("dynamic slot count must be >= 0");
    dynamic_.assign(static_cast<size_t>(dynamic_slots), first);
    t1_ = std::move(first);
}

std::vector<FeatureMap> TemplateBank::slot_features() const {
    std::vector<FeatureMap> maps;
    maps.reserve(dynamic_.size() + 1);
    maps.push_back(t1_.features);
    for (const auto& e : dynamic_) maps.push_back(e.features);
    return maps;
}

void TemplateBank::shift_in(TemplateEntry e) {
    if (dynamic_.empty()) return;
    dynamic_.erase(dynamic_.begin());
    dynamic_.push_back(std::move(e));
}

void TemplateBank::overwrite_dynamic(const TemplateEntry& e) {
    for (auto& slot : dynamic_) slot = e;
}

namespace {

void expect_phase(const TrackerState& st, TemporalPhase want, const char* op) {
    if (st.phase != want)
        throw Error(std::string(op) + " called out of order (smooth -> correct -> update)");
}

}  // namespace

BBox smooth_box(const BBox& y_i, TrackerState& st, const TrackerConfig& cfg) {
    expect_phase(st, TemporalPhase::kSmooth, "smooth_box");
    st.phase = TemporalPhase::kCorrect;
    if (!cfg.enable_smoothing || !st.s_prev) return y_i;
    const BBox& prev = *st.s_prev;
    const float a = cfg.alpha;
    return BBox{a * y_i.x + (1 - a) * prev.x, a * y_i.y + (1 - a) * prev.y,
                a * y_i.w + (1 - a) * prev.w, a * y_i.h + (1 - a) * prev.h};
}

BBox correct_box(const BBox& y_is, const Image* frame, const TemplateExtractor& extract,
                 TrackerState& st, const TrackerConfig& cfg) {
    expect_phase(st, TemporalPhase::kCorrect, "correct_box");
    st.phase = TemporalPhase::kUpdate;

    BBox y_ic = y_is;
    if (cfg.enable_correction && st.s_prev) {
        const BBox& prev = *st.s_prev;
        if (prev.area() <= 0.f) throw Error("previous box has non-positive area");
        const float d = std::hypot(y_is.cx() - prev.cx(), y_is.cy() - prev.cy());
        const float r = y_is.area() / prev.area();
        const float d_limit = cfg.theta_d * prev.diag();
        const bool jump = d > d_limit || r > cfg.theta_s ||
                          (cfg.check_shrink && r < 1.f / cfg.theta_s);
        if (jump) {
            y_ic = st.s_stable ? *st.s_stable : prev;
            if (extract) {
                if (auto entry = extract(frame, y_ic)) st.bank.overwrite_dynamic(*entry);
            }
        } else {
            st.s_stable = y_is;
        }
    }
    st.s_prev = y_ic;
    return y_ic;
}

void update_templates(const Image* frame, const BBox& y_ic, float conf,
                      const TemplateExtractor& extract, TrackerState& st,
                      const TrackerConfig& cfg) {
    expect_phase(st, TemporalPhase::kUpdate, "update_templates");
    if (cfg.update_interval > 0 && st.frame_index % cfg.update_interval == 0 &&
        conf >= cfg.conf_th) {
        if (extract) {
            if (auto entry = extract(frame, y_ic)) st.bank.shift_in(std::move(*entry));
        }
    }
    ++st.frame_index;
    st.phase = TemporalPhase::kSmooth;
}

std::string state_snapshot(const TrackerState& st) {
    std::ostringstream os;
    auto box_str = [](const BBox& b) {
        std::ostringstream s;
        s << b.x << "," << b.y << "," << b.w << "," << b.h;
        return s.str();
    };
    os << "frame " << st.frame_index << "\n";
    os << "s_prev " << (st.s_prev ? box_str(*st.s_prev) : "none") << "\n";
    os << "s_stable " << (st.s_stable ? box_str(*st.s_stable) : "none") << "\n";
    os << "slot 0 static frame " << st.bank.static_slot().source_frame << " box "
       << box_str(st.bank.static_slot().source_box) << "\n";
    const auto& dyn = st.bank.dynamic_slots();
    for (size_t i = 0; i < dyn.size(); ++i)
        os << "slot " << (i + 1) << " dynamic frame " << dyn[i].source_frame << " box "
           << box_str(dyn[i].source_box) << "\n";
    return os.str();
}

}  // namespace tpat
