#include "tpat/box.hpp"

#include <algorithm>

namespace tpat {

namespace {

double intersection_area(const BBox& a, const BBox& b) {
    const double iw = std::min<double>(a.x + a.w, b.x + b.w) - std::max<double>(a.x, b.x);
    const double ih = std::min<double>(a.y + a.h, b.y + b.h) - std::max<double>(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return iw * ih;
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double cle(const BBox& a, const BBox& b) {
    return std::hypot(static_cast<double>(a.cx()) - b.cx(), static_cast<double>(a.cy()) - b.cy());
}

double giou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
    const double cw = std::max<double>(a.x + a.w, b.x + b.w) - std::min<double>(a.x, b.x);
    const double ch = std::max<double>(a.y + a.h, b.y + b.h) - std::min<double>(a.y, b.y);
    const double enclose = cw * ch;
    const double iou_v = uni > 0.0 ? inter / uni : 0.0;
    return enclose > 0.0 ? iou_v - (enclose - uni) / enclose : iou_v;
}

}  // namespace tpat
