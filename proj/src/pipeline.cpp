#include "tpat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "tpat/errors.hpp"

namespace tpat {

namespace {

constexpr int kStride3 = 16;  // stage-3 stride, crop pixels per fused cell

void store_attention(ParamStore& s, const std::string& base, const AttentionParams& p) {
    s.put(base + ".wq", p.wq);
    s.put(base + ".wk", p.wk);
    s.put(base + ".wv", p.wv);
    s.put(base + ".wo", p.wo);
    s.put(base + ".ffn_w1", p.ffn_w1);
    s.put(base + ".ffn_b1", p.ffn_b1);
    s.put(base + ".ffn_w2", p.ffn_w2);
    s.put(base + ".ffn_b2", p.ffn_b2);
    s.put(base + ".ln1_scale", p.ln1_scale);
    s.put(base + ".ln1_shift", p.ln1_shift);
    s.put(base + ".ln2_scale", p.ln2_scale);
    s.put(base + ".ln2_shift", p.ln2_shift);
}

void load_attention(AttentionParams& p, const ParamStore& s, const std::string& base) {
    auto maybe = [&](Tensor& dst, const std::string& name) {
        if (s.contains(name)) dst = s.get(name);
    };
    maybe(p.wq, base + ".wq");
    maybe(p.wk, base + ".wk");
    maybe(p.wv, base + ".wv");
    maybe(p.wo, base + ".wo");
    maybe(p.ffn_w1, base + ".ffn_w1");
    maybe(p.ffn_b1, base + ".ffn_b1");
    maybe(p.ffn_w2, base + ".ffn_w2");
    maybe(p.ffn_b2, base + ".ffn_b2");
    maybe(p.ln1_scale, base + ".ln1_scale");
    maybe(p.ln1_shift, base + ".ln1_shift");
    maybe(p.ln2_scale, base + ".ln2_scale");
    maybe(p.ln2_shift, base + ".ln2_shift");
}

void store_modulation(ParamStore& s, const std::string& base, const ModulationParams& m) {
    s.put(base + ".wz", m.wz);
    s.put(base + ".bz", m.bz);
    s.put(base + ".fc1_w", m.fc1_w);
    s.put(base + ".fc1_b", m.fc1_b);
    s.put(base + ".fc2_w", m.fc2_w);
    s.put(base + ".fc2_b", m.fc2_b);
    s.put(base + ".gamma", Tensor({1}, {m.gamma}));
}

void load_modulation(ModulationParams& m, const ParamStore& s, const std::string& base) {
    auto maybe = [&](Tensor& dst, const std::string& name) {
        if (s.contains(name)) dst = s.get(name);
    };
    maybe(m.wz, base + ".wz");
    maybe(m.bz, base + ".bz");
    maybe(m.fc1_w, base + ".fc1_w");
    maybe(m.fc1_b, base + ".fc1_b");
    maybe(m.fc2_w, base + ".fc2_w");
    maybe(m.fc2_b, base + ".fc2_b");
    if (s.contains(base + ".gamma")) m.gamma = s.get(base + ".gamma").data()[0];
}

BBox clamp_to_frame(const BBox& b, int w, int h) {
    const float bw = std::clamp(b.w, 2.f, 2.f * w);
    const float bh = std::clamp(b.h, 2.f, 2.f * h);
    const float cx = std::clamp(b.cx(), 0.f, static_cast<float>(w));
    const float cy = std::clamp(b.cy(), 0.f, static_cast<float>(h));
    return BBox{cx - bw / 2, cy - bh / 2, bw, bh};
}

}  // namespace

void validate(const RunConfig& cfg) {
    if (cfg.template_count < 2 || cfg.template_count > 5)
        throw ConfigError("template_count must be in 2..5, got " +
                          std::to_string(cfg.template_count));
    if (cfg.search_size % 16 != 0 || cfg.template_size % 16 != 0)
        throw ConfigError("search_size and template_size must be divisible by 16");
    if (cfg.search_factor <= 0.f || cfg.template_context <= 0.f)
        throw ConfigError("crop factors must be positive");
    if (cfg.tracker.alpha < 0.f || cfg.tracker.alpha > 1.f)
        throw ConfigError("alpha must lie in [0,1]");
    if (cfg.tracker.theta_s <= 1.f) throw ConfigError("theta_s must exceed 1");
}

ModelParams make_model_params(const RunConfig& cfg) {
    validate(cfg);
    ModelParams m;
    m.backbone = make_backbone_params(cfg.model_seed);
    m.tpn = make_tpn_params(cfg.model_seed, cfg.gamma);
    m.tpn.use_mpa = cfg.use_mpa;
    m.fusion = make_fusion_params(cfg.model_seed, cfg.template_count, cfg.combine, cfg.gamma);
    m.fusion.use_mpa = cfg.use_mpa;
    m.head = make_head_params(cfg.model_seed);
    if (!cfg.params_path.empty()) model_from_store(m, ParamStore::load(cfg.params_path));
    return m;
}

ParamStore model_to_store(const ModelParams& m) {
    ParamStore s;
    s.put("backbone.w1", m.backbone.w1);
    s.put("backbone.b1", m.backbone.b1);
    s.put("backbone.w2", m.backbone.w2);
    s.put("backbone.b2", m.backbone.b2);
    s.put("backbone.w3", m.backbone.w3);
    s.put("backbone.b3", m.backbone.b3);
    s.put("tpn.adapt.w2", m.tpn.adapt.w2);
    s.put("tpn.adapt.b2", m.tpn.adapt.b2);
    s.put("tpn.adapt.w3", m.tpn.adapt.w3);
    s.put("tpn.adapt.b3", m.tpn.adapt.b3);
    s.put("tpn.adapt.w4", m.tpn.adapt.w4);
    s.put("tpn.adapt.b4", m.tpn.adapt.b4);
    store_attention(s, "tpn.low.attn", m.tpn.branch_low.attn);
    store_modulation(s, "tpn.low.mod", m.tpn.branch_low.mod);
    store_attention(s, "tpn.mid.attn", m.tpn.branch_mid);
    store_attention(s, "tpn.high.attn", m.tpn.branch_high.attn);
    store_modulation(s, "tpn.high.mod", m.tpn.branch_high.mod);
    store_attention(s, "tpn.refine1", m.tpn.refine1);
    store_attention(s, "tpn.refine2", m.tpn.refine2);
    store_attention(s, "fusion.attn", m.fusion.attn);
    store_modulation(s, "fusion.mod", m.fusion.mod);
    s.put("head.cls_w1", m.head.cls_w1);
    s.put("head.cls_b1", m.head.cls_b1);
    s.put("head.cls_w2", m.head.cls_w2);
    s.put("head.cls_b2", m.head.cls_b2);
    s.put("head.reg_w1", m.head.reg_w1);
    s.put("head.reg_b1", m.head.reg_b1);
    s.put("head.reg_w2", m.head.reg_w2);
    s.put("head.reg_b2", m.head.reg_b2);
    return s;
}

void model_from_store(ModelParams& m, const ParamStore& s) {
    auto maybe = [&](Tensor& dst, const std::string& name) {
        if (s.contains(name)) dst = s.get(name);
    };
    maybe(m.backbone.w1, "backbone.w1");
    maybe(m.backbone.b1, "backbone.b1");
    maybe(m.backbone.w2, "backbone.w2");
    maybe(m.backbone.b2, "backbone.b2");
    maybe(m.backbone.w3, "backbone.w3");
    maybe(m.backbone.b3, "backbone.b3");
    maybe(m.tpn.adapt.w2, "tpn.adapt.w2");
    maybe(m.tpn.adapt.b2, "tpn.adapt.b2");
    maybe(m.tpn.adapt.w3, "tpn.adapt.w3");
    maybe(m.tpn.adapt.b3, "tpn.adapt.b3");
    maybe(m.tpn.adapt.w4, "tpn.adapt.w4");
    maybe(m.tpn.adapt.b4, "tpn.adapt.b4");
    load_attention(m.tpn.branch_low.attn, s, "tpn.low.attn");
    load_modulation(m.tpn.branch_low.mod, s, "tpn.low.mod");
    load_attention(m.tpn.branch_mid, s, "tpn.mid.attn");
    load_attention(m.tpn.branch_high.attn, s, "tpn.high.attn");
    load_modulation(m.tpn.branch_high.mod, s, "tpn.high.mod");
    load_attention(m.tpn.refine1, s, "tpn.refine1");
    load_attention(m.tpn.refine2, s, "tpn.refine2");
    load_attention(m.fusion.attn, s, "fusion.attn");
    load_modulation(m.fusion.mod, s, "fusion.mod");
    maybe(m.head.cls_w1, "head.cls_w1");
    maybe(m.head.cls_b1, "head.cls_b1");
    maybe(m.head.cls_w2, "head.cls_w2");
    maybe(m.head.cls_b2, "head.cls_b2");
    maybe(m.head.reg_w1, "head.reg_w1");
    maybe(m.head.reg_b1, "head.reg_b1");
    maybe(m.head.reg_w2, "head.reg_w2");
    maybe(m.head.reg_b2, "head.reg_b2");
}

TrackerConfig effective_tracker_config(const RunConfig& cfg) {
    TrackerConfig t = cfg.tracker;
    if (!cfg.temporal) {
        t.enable_smoothing = false;
        t.enable_correction = false;
        t.conf_th = std::numeric_limits<float>::infinity();
    }
    return t;
}

FeatureMap search_features(const Image& crop, const ModelParams& m) {
    return tpn_forward(extract_pyramid(crop, m.backbone), m.tpn);
}

std::optional<TemplateEntry> extract_template(const Image& frame, const BBox& box,
                                              const ModelParams& m, const RunConfig& cfg,
                                              long frame_index) {
    if (!box.valid()) return std::nullopt;
    const float side = cfg.template_context * std::max(box.w, box.h);
    Image crop;
    try {
        crop = crop_resize(frame, box.cx(), box.cy(), side, cfg.template_size);
    } catch (const ExtractionError&) {
        return std::nullopt;
    }
    TemplateEntry entry;
    entry.features = tpn_forward(extract_pyramid(crop, m.backbone), m.tpn);
    entry.source_box = box;
    entry.source_frame = frame_index;
    return entry;
}

FeatureMap fuse_features(const FeatureMap& search, const TemplateBank& bank,
                         const ModelParams& m, const RunConfig& cfg, AttentionDebug* dbg) {
    if (cfg.fusion == FusionMode::kCrossCorrelation)
        return cross_correlate(search, bank.static_slot().features);
    TemplateFeatures slots{bank.slot_features()};
    return fuse(search, combine_templates(slots, cfg.combine), m.fusion, dbg);
}

TrackerSession::TrackerSession(RunConfig cfg, const ModelParams* model)
    : cfg_(std::move(cfg)), model_(model), tcfg_(effective_tracker_config(cfg_)) {
    validate(cfg_);
}

void TrackerSession::init(const Image& frame0, const BBox& gt0) {
    if (!gt0.valid()) throw ConfigError("initial box must have positive extents");
    auto t1 = extract_template(frame0, gt0, *model_, cfg_, 0);
    if (!t1) throw ExtractionError("initial template extraction failed");
    state_ = TrackerState{};
    state_.bank.init(std::move(*t1), cfg_.template_count - 1);
    state_.s_prev = gt0;
    state_.frame_index = 1;
    last_conf_ = 1.f;
}

BBox TrackerSession::process_frame(const Image& frame) {
    if (!state_.s_prev) throw Error("session not initialized");
    const BBox ref = *state_.s_prev;
    const float side = cfg_.search_factor * std::max(ref.w, ref.h);
    const Image crop = crop_resize(frame, ref.cx(), ref.cy(), side, cfg_.search_size);

    const FeatureMap feats = search_features(crop, *model_);
    const FeatureMap fused = fuse_features(feats, state_.bank, *model_, cfg_);
    const Prediction pred = predict(fused, model_->head, kStride3);

    // Back to image coordinates.
    const float scale = side / static_cast<float>(cfg_.search_size);
    const float x0 = ref.cx() - side / 2, y0 = ref.cy() - side / 2;
    BBox y_i{x0 + pred.box.x * scale, y0 + pred.box.y * scale, pred.box.w * scale,
             pred.box.h * scale};
    y_i = clamp_to_frame(y_i, frame.width(), frame.height());
    last_conf_ = pred.conf;

    auto extractor = [this, &frame](const Image* img, const BBox& box) {
        return extract_template(img ? *img : frame, box, *model_, cfg_,
                                state_.frame_index);
    };
    const BBox y_is = smooth_box(y_i, state_, tcfg_);
    const BBox y_ic = correct_box(y_is, &frame, extractor, state_, tcfg_);
    update_templates(&frame, y_ic, last_conf_, extractor, state_, tcfg_);
    return y_ic;
}

SequenceDir load_sequence_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    SequenceDir seq;
    if (!fs::is_directory(dir)) throw IoError(dir + " is not a directory");
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string ext = e.path().extension().string();
        if (ext == ".ppm" || ext == ".pgm" || ext == ".raw")
            seq.frame_paths.push_back(e.path().string());
    }
    std::sort(seq.frame_paths.begin(), seq.frame_paths.end());
    if (seq.frame_paths.empty()) throw IoError("no frames found in " + dir);
    seq.gt = read_boxes(dir + "/groundtruth.txt");
    if (seq.gt.size() < seq.frame_paths.size())
        throw ParseError("groundtruth.txt has " + std::to_string(seq.gt.size()) +
                         " lines for " + std::to_string(seq.frame_paths.size()) + " frames");
    return seq;
}

std::vector<BBox> track_sequence(const SequenceDir& seq, const RunConfig& cfg,
                                 const ModelParams& model) {
    if (seq.gt.empty() || !seq.gt[0].valid())
        throw ConfigError("frame 0 needs a valid ground-truth box");
    TrackerSession session(cfg, &model);
    std::vector<BBox> out;
    out.reserve(seq.frame_paths.size());
    Image frame0 = read_image(seq.frame_paths[0]);
    session.init(frame0, seq.gt[0]);
    out.push_back(seq.gt[0]);
    for (size_t f = 1; f < seq.frame_paths.size(); ++f)
        out.push_back(session.process_frame(read_image(seq.frame_paths[f])));
    return out;
}

SequenceResult track_synthetic(const SynthConfig& synth, const RunConfig& cfg,
                               const ModelParams& model) {
    std::vector<BBox> gt = synth_ground_truth(synth);
    if (gt.empty() || !gt[0].valid())
        throw ConfigError("synthetic sequence starts occluded; frame 0 must be visible");
    TrackerSession session(cfg, &model);
    session.init(synth_render(synth, 0), gt[0]);
    std::vector<BBox> pred;
    pred.reserve(gt.size());
    pred.push_back(gt[0]);
    for (int f = 1; f < synth.num_frames; ++f)
        pred.push_back(session.process_frame(synth_render(synth, f)));
    return make_sequence_result(std::move(pred), std::move(gt));
}

}  // namespace tpat
