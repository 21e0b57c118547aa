#include "tpat/head.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tpat/errors.hpp"
#include "tpat/rng.hpp"

namespace tpat {

namespace {

constexpr int kChannels = 192;
constexpr double kRawClamp = 12.0;  // caps exp() of the distance tower

Tensor seeded_uniform(std::vector<int> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    const float bound = 1.f / std::sqrt(static_cast<float>(t.extent(1)));
    Rng rng(seed);
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(-bound, bound);
    return t;
}

// out[c2][p] = sum_c1 w[c2][c1] * in[c1][p] + b[c2], double accumulation.
void conv_fwd(const std::vector<double>& in, const Tensor& w, const Tensor& b,
              std::vector<double>& out, int cin, int cout, int npx) {
    out.assign(static_cast<size_t>(cout) * npx, 0.0);
#pragma omp parallel for schedule(static) if (cout > 8)
    for (int co = 0; co < cout; ++co) {
        double* o = out.data() + static_cast<long>(co) * npx;
        for (int p = 0; p < npx; ++p) o[p] = b.data()[co];
        const float* wr = w.data() + static_cast<long>(co) * cin;
        for (int ci = 0; ci < cin; ++ci) {
            const double wv = wr[ci];
            const double* ir = in.data() + static_cast<long>(ci) * npx;
            for (int p = 0; p < npx; ++p) o[p] += wv * ir[p];
        }
    }
}

// Gradients of a conv layer: dw[c2][c1] = sum_p dout[c2][p]*in[c1][p],
// db[c2] = sum_p dout[c2][p], din[c1][p] = sum_c2 w[c2][c1]*dout[c2][p].
void conv_bwd(const std::vector<double>& in, const Tensor& w, const std::vector<double>& dout,
              Tensor& dw, Tensor& db, std::vector<double>& din, int cin, int cout, int npx) {
    for (int co = 0; co < cout; ++co) {
        const double* dr = dout.data() + static_cast<long>(co) * npx;
        double bsum = 0.0;
        for (int p = 0; p < npx; ++p) bsum += dr[p];
        db.data()[co] += static_cast<float>(bsum);
        float* dwr = dw.data() + static_cast<long>(co) * cin;
        for (int ci = 0; ci < cin; ++ci) {
            const double* ir = in.data() + static_cast<long>(ci) * npx;
            double acc = 0.0;
            for (int p = 0; p < npx; ++p) acc += dr[p] * ir[p];
            dwr[ci] += static_cast<float>(acc);
        }
    }
    din.assign(static_cast<size_t>(cin) * npx, 0.0);
#pragma omp parallel for schedule(static) if (cin > 8)
    for (int ci = 0; ci < cin; ++ci) {
        double* dir = din.data() + static_cast<long>(ci) * npx;
        for (int co = 0; co < cout; ++co) {
            const double wv = w.data()[static_cast<long>(co) * cin + ci];
            const double* dr = dout.data() + static_cast<long>(co) * npx;
            for (int p = 0; p < npx; ++p) dir[p] += wv * dr[p];
        }
    }
}

void relu_fwd(const std::vector<double>& pre, std::vector<double>& post) {
    post.resize(pre.size());
    for (size_t i = 0; i < pre.size(); ++i) post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
}

void relu_bwd(const std::vector<double>& pre, std::vector<double>& grad) {
    for (size_t i = 0; i < grad.size(); ++i)
        if (pre[i] <= 0.0) grad[i] = 0.0;
}

struct Forward {
    int h = 0, w = 0, npx = 0;
    std::vector<double> x;
    std::vector<double> cls_pre, cls_h, cls_logit;  // 192xN, 192xN, 1xN
    std::vector<double> reg_pre, reg_h, reg_raw;    // 192xN, 192xN, 4xN
    std::vector<double> reg_dist;                   // 4xN
};

Forward run_forward(const FeatureMap& fused, const HeadParams& p) {
    if (fused.channels() != kChannels)
        throw DimensionError("head expects 192-channel input, got " +
                             shape_str(fused.t.shape()));
    Forward f;
    f.h = fused.height();
    f.w = fused.width();
    f.npx = f.h * f.w;
    f.x.resize(static_cast<size_t>(kChannels) * f.npx);
    for (size_t i = 0; i < f.x.size(); ++i) f.x[i] = fused.t.data()[i];

    conv_fwd(f.x, p.cls_w1, p.cls_b1, f.cls_pre, kChannels, kChannels, f.npx);
    relu_fwd(f.cls_pre, f.cls_h);
    conv_fwd(f.cls_h, p.cls_w2, p.cls_b2, f.cls_logit, kChannels, 1, f.npx);

    conv_fwd(f.x, p.reg_w1, p.reg_b1, f.reg_pre, kChannels, kChannels, f.npx);
    relu_fwd(f.reg_pre, f.reg_h);
    conv_fwd(f.reg_h, p.reg_w2, p.reg_b2, f.reg_raw, kChannels, 4, f.npx);

    f.reg_dist.resize(f.reg_raw.size());
    for (size_t i = 0; i < f.reg_raw.size(); ++i)
        f.reg_dist[i] = std::exp(std::clamp(f.reg_raw[i], -kRawClamp, kRawClamp));
    return f;
}

double bce(double z, double t) {
    // max(z,0) - z*t + log(1 + exp(-|z|)); stable for any z.
    return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct GiouGrad {
    double value = 0;
    double dx1 = 0, dy1 = 0, dx2 = 0, dy2 = 0;
};

GiouGrad giou_with_grad(double x1, double y1, double x2, double y2, double gx1, double gy1,
                        double gx2, double gy2) {
    GiouGrad g;
    const double iw = std::min(x2, gx2) - std::max(x1, gx1);
    const double ih = std::min(y2, gy2) - std::max(y1, gy1);
    const bool inter = iw > 0.0 && ih > 0.0;
    const double inter_area = inter ? iw * ih : 0.0;
    const double a = (x2 - x1) * (y2 - y1);
    const double ag = (gx2 - gx1) * (gy2 - gy1);
    const double uni = a + ag - inter_area;
    const double cw = std::max(x2, gx2) - std::min(x1, gx1);
    const double ch = std::max(y2, gy2) - std::min(y1, gy1);
    const double enc = cw * ch;
    g.value = inter_area / uni - (enc - uni) / enc;

    const double di_x1 = inter && x1 > gx1 ? -ih : 0.0;
    const double di_x2 = inter && x2 < gx2 ? ih : 0.0;
    const double di_y1 = inter && y1 > gy1 ? -iw : 0.0;
    const double di_y2 = inter && y2 < gy2 ? iw : 0.0;
    const double da_x1 = -(y2 - y1), da_x2 = (y2 - y1);
    const double da_y1 = -(x2 - x1), da_y2 = (x2 - x1);
    const double dc_x1 = x1 < gx1 ? -ch : 0.0;
    const double dc_x2 = x2 > gx2 ? ch : 0.0;
    const double dc_y1 = y1 < gy1 ? -cw : 0.0;
    const double dc_y2 = y2 > gy2 ? cw : 0.0;

    auto partial = [&](double di, double da, double dc) {
        const double du = da - di;
        return (di * uni - inter_area * du) / (uni * uni) + (du * enc - uni * dc) / (enc * enc);
    };
    g.dx1 = partial(di_x1, da_x1, dc_x1);
    g.dx2 = partial(di_x2, da_x2, dc_x2);
    g.dy1 = partial(di_y1, da_y1, dc_y1);
    g.dy2 = partial(di_y2, da_y2, dc_y2);
    return g;
}

HeadParams zero_like(const HeadParams& p) {
    HeadParams g;
    g.cls_w1 = Tensor(p.cls_w1.shape());
    g.cls_b1 = Tensor(p.cls_b1.shape());
    g.cls_w2 = Tensor(p.cls_w2.shape());
    g.cls_b2 = Tensor(p.cls_b2.shape());
    g.reg_w1 = Tensor(p.reg_w1.shape());
    g.reg_b1 = Tensor(p.reg_b1.shape());
    g.reg_w2 = Tensor(p.reg_w2.shape());
    g.reg_b2 = Tensor(p.reg_b2.shape());
    return g;
}

struct CellTargets {
    std::vector<int> labels;          // per cell
    std::vector<int> positives;       // cell indices
    std::vector<double> target_dist;  // 4 per positive, l/t/r/b order
};

CellTargets make_targets(int h, int w, int stride, const BBox& gt) {
    CellTargets t;
    t.labels.assign(static_cast<size_t>(h) * w, 0);
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            const double cx = (col + 0.5) * stride;
            const double cy = (row + 0.5) * stride;
            if (cx >= gt.x && cx < gt.x + gt.w && cy >= gt.y && cy < gt.y + gt.h) {
                const int p = row * w + col;
                t.labels[static_cast<size_t>(p)] = 1;
                t.positives.push_back(p);
                t.target_dist.push_back((cx - gt.x) / stride);
                t.target_dist.push_back((cy - gt.y) / stride);
                t.target_dist.push_back((gt.x + gt.w - cx) / stride);
                t.target_dist.push_back((gt.y + gt.h - cy) / stride);
            }
        }
    return t;
}

}  // namespace

HeadParams make_head_params(std::uint64_t seed) {
    HeadParams p;
    p.cls_w1 = seeded_uniform({kChannels, kChannels}, seed_from_name(seed, "head.cls_w1"));
    p.cls_b1 = Tensor({kChannels});
    p.cls_w2 = seeded_uniform({1, kChannels}, seed_from_name(seed, "head.cls_w2"));
    p.cls_b2 = Tensor({1});
    p.reg_w1 = seeded_uniform({kChannels, kChannels}, seed_from_name(seed, "head.reg_w1"));
    p.reg_b1 = Tensor({kChannels});
    p.reg_w2 = seeded_uniform({4, kChannels}, seed_from_name(seed, "head.reg_w2"));
    p.reg_b2 = Tensor({4});
    return p;
}

HeadMaps head_forward(const FeatureMap& fused, const HeadParams& p) {
    Forward f = run_forward(fused, p);
    HeadMaps maps;
    maps.cls_map = Tensor({1, f.h, f.w});
    for (int i = 0; i < f.npx; ++i) maps.cls_map.data()[i] = static_cast<float>(f.cls_logit[i]);
    maps.reg_map = Tensor({4, f.h, f.w});
    for (size_t i = 0; i < f.reg_dist.size(); ++i)
        maps.reg_map.data()[i] = static_cast<float>(f.reg_dist[i]);
    return maps;
}

Prediction decode_prediction(const HeadMaps& maps, int stride) {
    const int h = maps.cls_map.extent(1), w = maps.cls_map.extent(2);
    const int npx = h * w;
    int best = 0;
    for (int p = 1; p < npx; ++p)
        if (maps.cls_map.data()[p] > maps.cls_map.data()[best]) best = p;

    Prediction pred;
    pred.cls_map = maps.cls_map;
    pred.reg_map = maps.reg_map;
    pred.best_row = best / w;
    pred.best_col = best % w;
    pred.conf = static_cast<float>(sigmoid(maps.cls_map.data()[best]));

    const double cx = (pred.best_col + 0.5) * stride;
    const double cy = (pred.best_row + 0.5) * stride;
    const double l = maps.reg_map.data()[0 * npx + best] * stride;
    const double t = maps.reg_map.data()[1 * npx + best] * stride;
    const double r = maps.reg_map.data()[2 * npx + best] * stride;
    const double b = maps.reg_map.data()[3 * npx + best] * stride;
    pred.box = BBox{static_cast<float>(cx - l), static_cast<float>(cy - t),
                    static_cast<float>(l + r), static_cast<float>(t + b)};
    return pred;
}

Prediction predict(const FeatureMap& fused, const HeadParams& p, int stride) {
    return decode_prediction(head_forward(fused, p), stride);
}

double combine_losses(double l_cls, double l_iou, double l_reg, const LossWeights& w) {
    return w.cls * l_cls + w.iou * l_iou + w.reg * l_reg;
}

LossResult total_loss(const FeatureMap& fused, const HeadParams& p, int stride, const BBox& gt,
                      const LossWeights& w) {
    Forward f = run_forward(fused, p);
    CellTargets tg = make_targets(f.h, f.w, stride, gt);
    const int npx = f.npx;
    const int npos = static_cast<int>(tg.positives.size());

    LossResult res;
    res.positive_cells = npos;
    res.grad = zero_like(p);

    // Classification: mean BCE over all cells.
    std::vector<double> dlogit(static_cast<size_t>(npx));
    double l_cls = 0.0;
    for (int i = 0; i < npx; ++i) {
        const double t = tg.labels[static_cast<size_t>(i)];
        l_cls += bce(f.cls_logit[static_cast<size_t>(i)], t);
        dlogit[static_cast<size_t>(i)] =
            w.cls * (sigmoid(f.cls_logit[static_cast<size_t>(i)]) - t) / npx;
    }
    l_cls /= npx;

    // Box terms over positive cells.
    std::vector<double> ddist(static_cast<size_t>(4) * npx, 0.0);
    double l_iou = 0.0, l_reg = 0.0;
    if (npos > 0) {
        const double gx1 = gt.x / stride, gy1 = gt.y / stride;
        const double gx2 = (gt.x + gt.w) / stride, gy2 = (gt.y + gt.h) / stride;
        for (int i = 0; i < npos; ++i) {
            const int cell = tg.positives[static_cast<size_t>(i)];
            const double ccx = (cell % f.w) + 0.5;
            const double ccy = (cell / f.w) + 0.5;
            const double dl = f.reg_dist[static_cast<size_t>(0 * npx + cell)];
            const double dt = f.reg_dist[static_cast<size_t>(1 * npx + cell)];
            const double dr = f.reg_dist[static_cast<size_t>(2 * npx + cell)];
            const double db = f.reg_dist[static_cast<size_t>(3 * npx + cell)];

            GiouGrad gg = giou_with_grad(ccx - dl, ccy - dt, ccx + dr, ccy + db, gx1, gy1, gx2, gy2);
            l_iou += 1.0 - gg.value;
            // d(1-giou)/dl = -dgiou/dx1 * dx1/dl with x1 = cx - l, and so on;
            // the two minus signs cancel on the near edges.
            ddist[static_cast<size_t>(0 * npx + cell)] += w.iou * gg.dx1 / npos;
            ddist[static_cast<size_t>(1 * npx + cell)] += w.iou * gg.dy1 / npos;
            ddist[static_cast<size_t>(2 * npx + cell)] -= w.iou * gg.dx2 / npos;
            ddist[static_cast<size_t>(3 * npx + cell)] -= w.iou * gg.dy2 / npos;

            const double tgt[4] = {tg.target_dist[static_cast<size_t>(4 * i + 0)],
                                   tg.target_dist[static_cast<size_t>(4 * i + 1)],
                                   tg.target_dist[static_cast<size_t>(4 * i + 2)],
                                   tg.target_dist[static_cast<size_t>(4 * i + 3)]};
            const double dist[4] = {dl, dt, dr, db};
            for (int k = 0; k < 4; ++k) {
                l_reg += std::abs(dist[k] - tgt[k]);
                ddist[static_cast<size_t>(k * npx + cell)] +=
                    w.reg * (dist[k] > tgt[k] ? 1.0 : -1.0) / (4.0 * npos);
            }
        }
        l_iou /= npos;
        l_reg /= 4.0 * npos;
    }

    res.cls = l_cls;
    res.iou = l_iou;
    res.reg = l_reg;
    res.total = combine_losses(l_cls, l_iou, l_reg, w);

    // Backward through the regression tower: dist = exp(raw).
    std::vector<double> draw(static_cast<size_t>(4) * npx);
    for (size_t i = 0; i < draw.size(); ++i) {
        const bool clamped = f.reg_raw[i] <= -kRawClamp || f.reg_raw[i] >= kRawClamp;
        draw[i] = clamped ? 0.0 : ddist[i] * f.reg_dist[i];
    }
    std::vector<double> dh_reg, dx_reg;
    conv_bwd(f.reg_h, p.reg_w2, draw, res.grad.reg_w2, res.grad.reg_b2, dh_reg, kChannels, 4, npx);
    relu_bwd(f.reg_pre, dh_reg);
    conv_bwd(f.x, p.reg_w1, dh_reg, res.grad.reg_w1, res.grad.reg_b1, dx_reg, kChannels, kChannels,
             npx);

    // Backward through the classification tower.
    std::vector<double> dh_cls, dx_cls;
    conv_bwd(f.cls_h, p.cls_w2, dlogit, res.grad.cls_w2, res.grad.cls_b2, dh_cls, kChannels, 1,
             npx);
    relu_bwd(f.cls_pre, dh_cls);
    conv_bwd(f.x, p.cls_w1, dh_cls, res.grad.cls_w1, res.grad.cls_b1, dx_cls, kChannels, kChannels,
             npx);

    res.grad_input = Tensor({kChannels, f.h, f.w});
    for (size_t i = 0; i < dx_cls.size(); ++i)
        res.grad_input.data()[i] = static_cast<float>(dx_cls[i] + dx_reg[i]);
    return res;
}

double loss_value(const FeatureMap& fused, const HeadParams& p, int stride, const BBox& gt,
                  const LossWeights& w) {
    Forward f = run_forward(fused, p);
    CellTargets tg = make_targets(f.h, f.w, stride, gt);
    const int npx = f.npx;
    const int npos = static_cast<int>(tg.positives.size());

    double l_cls = 0.0;
    for (int i = 0; i < npx; ++i)
        l_cls += bce(f.cls_logit[static_cast<size_t>(i)], tg.labels[static_cast<size_t>(i)]);
    l_cls /= npx;

    double l_iou = 0.0, l_reg = 0.0;
    if (npos > 0) {
        const double gx1 = gt.x / stride, gy1 = gt.y / stride;
        const double gx2 = (gt.x + gt.w) / stride, gy2 = (gt.y + gt.h) / stride;
        for (int i = 0; i < npos; ++i) {
            const int cell = tg.positives[static_cast<size_t>(i)];
            const double ccx = (cell % f.w) + 0.5;
            const double ccy = (cell / f.w) + 0.5;
            const double dl = f.reg_dist[static_cast<size_t>(0 * npx + cell)];
            const double dt = f.reg_dist[static_cast<size_t>(1 * npx + cell)];
            const double dr = f.reg_dist[static_cast<size_t>(2 * npx + cell)];
            const double db = f.reg_dist[static_cast<size_t>(3 * npx + cell)];
            GiouGrad gg = giou_with_grad(ccx - dl, ccy - dt, ccx + dr, ccy + db, gx1, gy1, gx2, gy2);
            l_iou += 1.0 - gg.value;
            const double dist[4] = {dl, dt, dr, db};
            for (int k = 0; k < 4; ++k)
                l_reg += std::abs(dist[k] - tg.target_dist[static_cast<size_t>(4 * i + k)]);
        }
        l_iou /= npos;
        l_reg /= 4.0 * npos;
    }
    return combine_losses(l_cls, l_iou, l_reg, w);
}

double grad_check(const std::function<double()>& loss_fn, Tensor& values, const Tensor& analytic,
                  double epsilon, int max_checks, std::uint64_t seed) {
    if (!values.same_shape(analytic))
        throw DimensionError("grad_check shapes differ: " + shape_str(values.shape()) + " vs " +
                             shape_str(analytic.shape()));
    const std::int64_t n = values.numel();
    std::vector<std::int64_t> indices;
    if (max_checks <= 0 || max_checks >= n) {
        indices.resize(static_cast<size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) indices[static_cast<size_t>(i)] = i;
    } else {
        Rng rng(seed);
        indices.reserve(static_cast<size_t>(max_checks));
        for (int i = 0; i < max_checks; ++i)
            indices.push_back(static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(n)));
    }

    double max_rel = 0.0;
    for (std::int64_t idx : indices) {
        float& v = values.data()[idx];
        const float orig = v;
        v = orig + static_cast<float>(epsilon);
        const float v_plus = v;
        const double f_plus = loss_fn();
        v = orig - static_cast<float>(epsilon);
        const float v_minus = v;
        const double f_minus = loss_fn();
        v = orig;
        const double eps_eff = (static_cast<double>(v_plus) - v_minus) / 2.0;
        const double numeric = (f_plus - f_minus) / (2.0 * eps_eff);
        const double a = analytic.data()[idx];
        const double rel =
            std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

void apply_gradient_step(HeadParams& p, const HeadParams& grad, float lr) {
    auto step = [lr](Tensor& t, const Tensor& g) {
        for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] -= lr * g.data()[i];
    };
    step(p.cls_w1, grad.cls_w1);
    step(p.cls_b1, grad.cls_b1);
    step(p.cls_w2, grad.cls_w2);
    step(p.cls_b2, grad.cls_b2);
    step(p.reg_w1, grad.reg_w1);
    step(p.reg_b1, grad.reg_b1);
    step(p.reg_w2, grad.reg_w2);
    step(p.reg_b2, grad.reg_b2);
}

}  // namespace tpat
