#ifndef TPAT_METRICS_HPP_
#define TPAT_METRICS_HPP_

#include <string>
#include <vector>

#include "tpat/box.hpp"

namespace tpat {

// One tracked sequence: per-frame predictions against ground truth. Frames
// whose ground truth marks the target absent (w or h zero in the file) are
// flagged invalid and excluded from every metric denominator.
struct SequenceResult {
    std::vector<BBox> pred;
    std::vector<BBox> gt;
    std::vector<bool> valid;
};

struct Curve {
    std::vector<double> thresholds;
    std::vector<double> values;
    double auc = 0;  // unweighted mean over the grid
};

struct MetricReport {
    double success_auc = 0;
    double precision_at_20 = 0;
    double norm_precision_auc = 0;
    double ao = 0;
    double sr_050 = 0;
    double sr_075 = 0;
    Curve success, precision, norm_precision;
};

// IoU thresholds 0.00..1.00 step 0.05; value(t) = fraction of valid frames
// with IoU strictly above t.
Curve success_curve(const SequenceResult& r);

// CLE thresholds 0..50 step 1; value(t) = fraction with CLE <= t.
Curve precision_curve(const SequenceResult& r);

// Center error normalized per-axis by the ground-truth extents, thresholds
// 0..0.5 step 0.01.
Curve norm_precision_curve(const SequenceResult& r);

// Average overlap plus success rates at 0.5 and 0.75.
struct AoSr {
    double ao = 0, sr_050 = 0, sr_075 = 0;
};
AoSr ao_sr(const SequenceResult& r);

MetricReport evaluate(const SequenceResult& r);

// Text format: one "x,y,w,h" line per frame, decimal reals, LF-terminated.
// A ground-truth line with zero extents marks the target absent.
std::vector<BBox> read_boxes(const std::string& path);
void write_boxes(const std::vector<BBox>& boxes, const std::string& path);

SequenceResult make_sequence_result(std::vector<BBox> pred, std::vector<BBox> gt);

std::string report_json(const MetricReport& m);
std::string report_csv(const MetricReport& m);

}  // namespace tpat

#endif  // TPAT_METRICS_HPP_
