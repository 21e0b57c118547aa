#ifndef TPAT_BOX_HPP_
#define TPAT_BOX_HPP_

#include <cmath>

namespace tpat {

// Axis-aligned box, top-left corner plus extents, image pixels.
struct BBox {
    float x = 0, y = 0, w = 0, h = 0;

    float cx() const { return x + w / 2.f; }
    float cy() const { return y + h / 2.f; }
    float area() const { return w * h; }
    float diag() const { return std::hypot(w, h); }
    bool valid() const { return w > 0.f && h > 0.f; }
    bool operator==(const BBox&) const = default;
};

// Intersection over union, in [0, 1].
double iou(const BBox& a, const BBox& b);

// Center location error in pixels.
double cle(const BBox& a, const BBox& b);

// Generalized IoU in [-1, 1]: IoU minus the enclosing box's empty fraction.
double giou(const BBox& a, const BBox& b);

inline double giou_loss(const BBox& a, const BBox& b) { return 1.0 - giou(a, b); }

}  // namespace tpat

#endif  // TPAT_BOX_HPP_
