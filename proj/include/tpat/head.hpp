#ifndef TPAT_HEAD_HPP_
#define TPAT_HEAD_HPP_

#include <cstdint>
#include <functional>

#include "tpat/box.hpp"
#include "tpat/tensor.hpp"

namespace tpat {

// Two-layer 1x1-conv towers over the fused map: 192 -> 192 -> 1 scores and
// 192 -> 192 -> 4 edge distances. Loss and gradients run in double
// internally so finite-difference checks are meaningful.
struct HeadParams {
    Tensor cls_w1, cls_b1;  // 192 x 192
    Tensor cls_w2, cls_b2;  // 1 x 192
    Tensor reg_w1, reg_b1;  // 192 x 192
    Tensor reg_w2, reg_b2;  // 4 x 192
};

HeadParams make_head_params(std::uint64_t seed);

// Raw head outputs. reg_map holds positive distances to the left/top/right/
// bottom box edges, in feature cells (exp of the tower output).
struct HeadMaps {
    Tensor cls_map;  // 1 x H x W, pre-sigmoid scores
    Tensor reg_map;  // 4 x H x W, edge distances in cells
};

struct Prediction {
    Tensor cls_map;
    Tensor reg_map;
    BBox box;        // crop pixels
    float conf = 0;  // sigmoid of the peak score
    int best_row = 0, best_col = 0;
};

HeadMaps head_forward(const FeatureMap& fused, const HeadParams& p);

// Argmax cell (ties -> lowest row-major index), box decoded from that
// cell's distances scaled by the stride.
Prediction decode_prediction(const HeadMaps& maps, int stride);

Prediction predict(const FeatureMap& fused, const HeadParams& p, int stride);

struct LossWeights {
    float cls = 5.f;
    float iou = 2.f;
    float reg = 2.f;
};

// lambda-weighted sum of the three loss terms; the building block is kept
// separate so the combination rule is testable on its own.
double combine_losses(double l_cls, double l_iou, double l_reg, const LossWeights& w);

struct LossResult {
    double total = 0;
    double cls = 0, iou = 0, reg = 0;  // unweighted components
    int positive_cells = 0;
    HeadParams grad;     // same shapes as the parameters
    Tensor grad_input;   // 192 x H x W
};

// BCE over all cells (positives = cells whose centers fall inside the
// ground-truth box), GIoU and L1 losses over positive cells, Eq-style
// weighted sum, with analytic gradients for every head parameter and the
// fused input. With no positive cells the IoU/L1 terms contribute zero.
LossResult total_loss(const FeatureMap& fused, const HeadParams& p, int stride, const BBox& gt,
                      const LossWeights& w);

// Forward-only evaluation of the same objective.
double loss_value(const FeatureMap& fused, const HeadParams& p, int stride, const BBox& gt,
                  const LossWeights& w);

// Central-difference check of `analytic` against loss_fn around the current
// values. Checks every element when max_checks == 0, otherwise a seeded
// random subset. Returns max over checked elements of
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<double()>& loss_fn, Tensor& values, const Tensor& analytic,
                  double epsilon, int max_checks = 0, std::uint64_t seed = 1);

// One plain gradient-descent step over every head parameter.
void apply_gradient_step(HeadParams& p, const HeadParams& grad, float lr);

}  // namespace tpat

#endif  // TPAT_HEAD_HPP_
