#include "tpat/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tpat/errors.hpp"

namespace tpat {

namespace {

std::vector<int> valid_indices(const SequenceResult& r) {
    std::vector<int> idx;
    for (size_t i = 0; i < r.valid.size(); ++i)
        if (r.valid[i]) idx.push_back(static_cast<int>(i));
    if (idx.empty()) throw Error("sequence has no valid frames");
    return idx;
}

Curve sweep(const std::vector<double>& samples, double t0, double step, int count,
            bool greater) {
    Curve c;
    c.thresholds.resize(static_cast<size_t>(count));
    c.values.resize(static_cast<size_t>(count));
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
        const double t = t0 + step * i;
        int hits = 0;
        for (double s : samples)
            if (greater ? s > t : s <= t) ++hits;
        c.thresholds[static_cast<size_t>(i)] = t;
        c.values[static_cast<size_t>(i)] = static_cast<double>(hits) / samples.size();
        sum += c.values[static_cast<size_t>(i)];
    }
    c.auc = sum / count;
    return c;
}

}  // namespace

Curve success_curve(const SequenceResult& r) {
    std::vector<double> ious;
    for (int i : valid_indices(r)) ious.push_back(iou(r.pred[i], r.gt[i]));
    return sweep(ious, 0.0, 0.05, 21, /*greater=*/true);
}

Curve precision_curve(const SequenceResult& r) {
    std::vector<double> errs;
    for (int i : valid_indices(r)) errs.push_back(cle(r.pred[i], r.gt[i]));
    return sweep(errs, 0.0, 1.0, 51, /*greater=*/false);
}

Curve norm_precision_curve(const SequenceResult& r) {
    std::vector<double> errs;
    for (int i : valid_indices(r)) {
        const BBox& g = r.gt[i];
        const double dx = (static_cast<double>(r.pred[i].cx()) - g.cx()) / g.w;
        const double dy = (static_cast<double>(r.pred[i].cy()) - g.cy()) / g.h;
        errs.push_back(std::hypot(dx, dy));
    }
    return sweep(errs, 0.0, 0.01, 51, /*greater=*/false);
}

AoSr ao_sr(const SequenceResult& r) {
    AoSr out;
    const auto idx = valid_indices(r);
    double sum = 0.0;
    int over_50 = 0, over_75 = 0;
    for (int i : idx) {
        const double v = iou(r.pred[i], r.gt[i]);
        sum += v;
        if (v > 0.5) ++over_50;
        if (v > 0.75) ++over_75;
    }
    out.ao = sum / idx.size();
    out.sr_050 = static_cast<double>(over_50) / idx.size();
    out.sr_075 = static_cast<double>(over_75) / idx.size();
    return out;
}

MetricReport evaluate(const SequenceResult& r) {
    MetricReport m;
    m.success = success_curve(r);
    m.precision = precision_curve(r);
    m.norm_precision = norm_precision_curve(r);
    m.success_auc = m.success.auc;
    m.precision_at_20 = m.precision.values.at(20);
    m.norm_precision_auc = m.norm_precision.auc;
    const AoSr a = ao_sr(r);
    m.ao = a.ao;
    m.sr_050 = a.sr_050;
    m.sr_075 = a.sr_075;
    return m;
}

std::vector<BBox> read_boxes(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::vector<BBox> boxes;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        BBox b;
        char c1, c2, c3;
        if (!(ls >> b.x >> c1 >> b.y >> c2 >> b.w >> c3 >> b.h) || c1 != ',' || c2 != ',' ||
            c3 != ',')
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected x,y,w,h");
        std::string rest;
        if (ls >> rest)
            throw ParseError(path + ":" + std::to_string(lineno) + ": trailing junk '" + rest +
                             "'");
        if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
            !std::isfinite(b.h))
            throw ParseError(path + ":" + std::to_string(lineno) + ": non-finite value");
        boxes.push_back(b);
    }
    return boxes;
}

void write_boxes(const std::vector<BBox>& boxes, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os.precision(9);
    for (const BBox& b : boxes)
        os << b.x << "," << b.y << "," << b.w << "," << b.h << "\n";
    if (!os) throw IoError("write failed for " + path);
}

SequenceResult make_sequence_result(std::vector<BBox> pred, std::vector<BBox> gt) {
    if (pred.size() != gt.size())
        throw DimensionError("result has " + std::to_string(pred.size()) + " frames, gt has " +
                             std::to_string(gt.size()));
    SequenceResult r;
    r.valid.reserve(gt.size());
    for (const BBox& g : gt) r.valid.push_back(g.valid());
    r.pred = std::move(pred);
    r.gt = std::move(gt);
    return r;
}

namespace {

nlohmann::json curve_json(const Curve& c) {
    return {{"thresholds", c.thresholds}, {"values", c.values}, {"auc", c.auc}};
}

}  // namespace

std::string report_json(const MetricReport& m) {
    nlohmann::json j{{"success_auc", m.success_auc},
                     {"precision_at_20", m.precision_at_20},
                     {"norm_precision_auc", m.norm_precision_auc},
                     {"ao", m.ao},
                     {"sr_050", m.sr_050},
                     {"sr_075", m.sr_075},
                     {"curves",
                      {{"success", curve_json(m.success)},
                       {"precision", curve_json(m.precision)},
                       {"norm_precision", curve_json(m.norm_precision)}}}};
    return j.dump(2) + "\n";
}

std::string report_csv(const MetricReport& m) {
    std::ostringstream os;
    os.precision(10);
    os << "metric,threshold,value\n";
    auto emit = [&os](const char* name, const Curve& c) {
        for (size_t i = 0; i < c.thresholds.size(); ++i)
            os << name << "," << c.thresholds[i] << "," << c.values[i] << "\n";
    };
    emit("success", m.success);
    emit("precision", m.precision);
    emit("norm_precision", m.norm_precision);
    return os.str();
}

}  // namespace tpat
