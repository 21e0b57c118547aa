#include "tpat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "tpat/errors.hpp"
#include "tpat/metrics.hpp"
#include "tpat/rng.hpp"

namespace tpat {

namespace {

constexpr int kTexSize = 16;       // texels per target/distractor edge
constexpr float kOccMargin = 4.f;  // occluder overhang past the box, px

struct Texture {
    std::vector<float> rgb;  // 3 x kTexSize x kTexSize

    static Texture random(std::uint64_t seed) {
        Texture t;
        t.rgb.resize(3 * kTexSize * kTexSize);
        Rng rng(seed);
        for (float& v : t.rgb) v = rng.uniform();
        return t;
    }

    static Texture blend(const Texture& a, const Texture& b, float wa) {
        Texture t;
        t.rgb.resize(a.rgb.size());
        for (size_t i = 0; i < t.rgb.size(); ++i)
            t.rgb[i] = wa * a.rgb[i] + (1 - wa) * b.rgb[i];
        return t;
    }

    float sample(int c, float u, float v) const {
        // Bilinear over the texel grid, clamped.
        const float x = std::clamp(u * kTexSize - 0.5f, 0.f, kTexSize - 1.f);
        const float y = std::clamp(v * kTexSize - 0.5f, 0.f, kTexSize - 1.f);
        const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
        const int x1 = std::min(x0 + 1, kTexSize - 1), y1 = std::min(y0 + 1, kTexSize - 1);
        const float fx = x - x0, fy = y - y0;
        auto at = [&](int yy, int xx) { return rgb[(c * kTexSize + yy) * kTexSize + xx]; };
        return (at(y0, x0) * (1 - fx) + at(y0, x1) * fx) * (1 - fy) +
               (at(y1, x0) * (1 - fx) + at(y1, x1) * fx) * fy;
    }
};

struct BackgroundField {
    float ax[3], ay[3], phase[3];

    static BackgroundField make(std::uint64_t seed) {
        BackgroundField f;
        Rng rng(seed);
        for (int c = 0; c < 3; ++c) {
            f.ax[c] = rng.uniform(0.02f, 0.06f);
            f.ay[c] = rng.uniform(0.02f, 0.06f);
            f.phase[c] = rng.uniform(0.f, 6.28f);
        }
        return f;
    }

    float at(int c, int x, int y) const {
        return 0.45f + 0.18f * std::sin(ax[c] * x + ay[c] * y + phase[c]);
    }
};

// Paints `tex` over `box` with bilinear texture lookup and soft half-pixel
// edges. Returns nothing; writes in place.
void paint_box(Image& img, const BBox& box, const Texture& tex) {
    const int h = img.height(), w = img.width();
    const long npx = static_cast<long>(h) * w;
    const int x_lo = std::max(0, static_cast<int>(std::floor(box.x)));
    const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(box.x + box.w)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(box.y)));
    const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(box.y + box.h)));
    float* data = img.t.data();
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            // Pixel-center coverage with a half-pixel feather.
            const float px = x + 0.5f, py = y + 0.5f;
            const float cov_x = std::min(px - box.x, box.x + box.w - px) + 0.5f;
            const float cov_y = std::min(py - box.y, box.y + box.h - py) + 0.5f;
            const float cov = std::clamp(std::min(cov_x, cov_y), 0.f, 1.f);
            if (cov <= 0.f) continue;
            const float u = (px - box.x) / box.w;
            const float v = (py - box.y) / box.h;
            for (int c = 0; c < 3; ++c) {
                float& dst = data[c * npx + y * w + x];
                dst = dst * (1 - cov) + tex.sample(c, u, v) * cov;
            }
        }
    }
}

BBox occluder_box(const BBox& target, bool full) {
    if (full)
        return BBox{target.x - kOccMargin, target.y - kOccMargin, target.w + 2 * kOccMargin,
                    target.h + 2 * kOccMargin};
    // Partial: hide the top 60% of the box.
    return BBox{target.x - kOccMargin, target.y - kOccMargin, target.w + 2 * kOccMargin,
                0.6f * target.h + kOccMargin};
}

const OccluderSpec* active_occluder(const SynthConfig& cfg, int frame) {
    for (const auto& o : cfg.occlusions)
        if (frame >= o.start && frame <= o.end) return &o;
    return nullptr;
}

BBox distractor_box(const SynthConfig& cfg, int which, int frame) {
    Rng rng(seed_from_name(cfg.seed, "distractor" + std::to_string(which)));
    const float w = cfg.target_w * rng.uniform(0.8f, 1.2f);
    const float h = cfg.target_h * rng.uniform(0.8f, 1.2f);
    float cx = rng.uniform(0.15f, 0.85f) * cfg.frame_w;
    float cy = rng.uniform(0.15f, 0.85f) * cfg.frame_h;
    float vx = rng.uniform(-2.5f, 2.5f);
    float vy = rng.uniform(-2.5f, 2.5f);
    // Bouncing linear path, advanced analytically via reflection.
    auto bounce = [](float p, float v, int t, float lo, float hi) {
        const float span = hi - lo;
        float q = std::fmod(p - lo + v * t, 2 * span);
        if (q < 0) q += 2 * span;
        return lo + (q <= span ? q : 2 * span - q);
    };
    cx = bounce(cx, vx, frame, w / 2 + 2, cfg.frame_w - w / 2 - 2);
    cy = bounce(cy, vy, frame, h / 2 + 2, cfg.frame_h - h / 2 - 2);
    return BBox{cx - w / 2, cy - h / 2, w, h};
}

}  // namespace

void validate(const SynthConfig& cfg) {
    if (cfg.frame_w < 32 || cfg.frame_h < 32) throw ConfigError("frame extent too small");
    if (cfg.num_frames < 1) throw ConfigError("num_frames must be >= 1");
    if (cfg.target_w < 4 || cfg.target_h < 4) throw ConfigError("target extent too small");
    for (const auto& o : cfg.occlusions) {
        if (o.start > o.end || o.start < 0 || o.end >= cfg.num_frames)
            throw ConfigError("occlusion interval [" + std::to_string(o.start) + "," +
                              std::to_string(o.end) + "] outside sequence of " +
                              std::to_string(cfg.num_frames) + " frames");
    }
}

BBox synth_target_box(const SynthConfig& cfg, int frame) {
    Rng rng(seed_from_name(cfg.seed, "target"));
    const float cx0 = cfg.frame_w * rng.uniform(0.3f, 0.7f);
    const float cy0 = cfg.frame_h * rng.uniform(0.3f, 0.7f);
    const float phase = rng.uniform(0.f, 6.28f);

    const float ang = 6.2831853f * frame / std::max(1.f, cfg.jitter_period);
    float cx = cx0 + cfg.vx * frame + cfg.jitter_amp * std::sin(ang + phase);
    float cy = cy0 + cfg.vy * frame + cfg.jitter_amp * std::cos(ang + phase);
    const float grow = std::pow(1.f + cfg.scale_drift, static_cast<float>(frame));
    const float w = cfg.target_w * grow;
    const float h = cfg.target_h * grow;
    cx = std::clamp(cx, w / 2 + 2, cfg.frame_w - w / 2 - 2);
    cy = std::clamp(cy, h / 2 + 2, cfg.frame_h - h / 2 - 2);
    return BBox{cx - w / 2, cy - h / 2, w, h};
}

bool synth_fully_occluded(const SynthConfig& cfg, int frame) {
    const OccluderSpec* o = active_occluder(cfg, frame);
    return o && o->full;
}

Image synth_render(const SynthConfig& cfg, int frame, bool with_target) {
    validate(cfg);
    const int h = cfg.frame_h, w = cfg.frame_w;
    Image img(h, w);
    const BackgroundField bg = BackgroundField::make(seed_from_name(cfg.seed, "bg"));
    float* data = img.t.data();
    const long npx = static_cast<long>(h) * w;
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) data[c * npx + y * w + x] = bg.at(c, x, y);

    const Texture target_tex = Texture::random(cfg.texture_seed);
    for (int d = 0; d < cfg.distractor_count; ++d) {
        const Texture own = Texture::random(seed_from_name(cfg.seed, "dtex" + std::to_string(d)));
        paint_box(img, distractor_box(cfg, d, frame),
                  Texture::blend(target_tex, own, cfg.distractor_similarity));
    }

    const BBox target = synth_target_box(cfg, frame);
    if (with_target) paint_box(img, target, target_tex);

    if (const OccluderSpec* occ = active_occluder(cfg, frame)) {
        const Texture occ_tex = Texture::random(seed_from_name(cfg.seed, "occluder"));
        paint_box(img, occluder_box(target, occ->full), occ_tex);
    }

    if (cfg.noise > 0.f) {
        Rng rng(seed_from_name(cfg.seed, "noise" + std::to_string(frame)));
        for (std::int64_t i = 0; i < img.t.numel(); ++i) {
            data[i] = std::clamp(data[i] + cfg.noise * (rng.uniform() - 0.5f), 0.f, 1.f);
        }
    }
    return img;
}

std::vector<BBox> synth_ground_truth(const SynthConfig& cfg) {
    validate(cfg);
    std::vector<BBox> gt;
    gt.reserve(static_cast<size_t>(cfg.num_frames));
    for (int f = 0; f < cfg.num_frames; ++f)
        gt.push_back(synth_fully_occluded(cfg, f) ? BBox{} : synth_target_box(cfg, f));
    return gt;
}

void synth_write(const SynthConfig& cfg, const std::string& out_dir) {
    validate(cfg);
    std::filesystem::create_directories(out_dir);
    for (int f = 0; f < cfg.num_frames; ++f) {
        char name[16];
        std::snprintf(name, sizeof(name), "%08d.ppm", f);
        write_ppm(synth_render(cfg, f), out_dir + "/" + name);
    }
    write_boxes(synth_ground_truth(cfg), out_dir + "/groundtruth.txt");
}

}  // namespace tpat
