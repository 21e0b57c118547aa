#include "tpat/tensor.hpp"

#include <cmath>
#include <cstring>

#include "tpat/errors.hpp"
#include "tpat/kernels.hpp"

namespace tpat {

namespace {

std::int64_t product(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int e : shape) {
        if (e <= 0) throw DimensionError("non-positive extent in shape " + shape_str(shape));
        n *= e;
    }
    return n;
}

void require_2d(const Tensor& t, const char* what) {
    if (t.ndim() != 2)
        throw DimensionError(std::string(what) + ": expected 2-D tensor, got " +
                             shape_str(t.shape()));
}

}  // namespace

Tensor::Tensor(std::vector<int> shape, float fill)
    : shape_(std::move(shape)), data_(static_cast<size_t>(product(shape_)), fill) {}

Tensor::Tensor(std::vector<int> shape, std::vector<float> values) : shape_(std::move(shape)) {
    if (product(shape_) != static_cast<std::int64_t>(values.size()))
        throw DimensionError("value count " + std::to_string(values.size()) +
                             " does not fill shape " + shape_str(shape_));
    data_ = std::move(values);
}

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

FeatureMap::FeatureMap(Tensor tensor, int stride_px) : t(std::move(tensor)), stride(stride_px) {
    if (t.ndim() != 3)
        throw DimensionError("feature map needs a CxHxW tensor, got " + shape_str(t.shape()));
    if (stride <= 0) throw DimensionError("feature map stride must be positive");
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul lhs");
    require_2d(b, "matmul rhs");
    if (a.extent(1) != b.extent(0))
        throw DimensionError("matmul inner extents differ: " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    Tensor out({a.extent(0), b.extent(1)});
    kernels::matmul(a.data(), b.data(), out.data(), a.extent(0), a.extent(1), b.extent(1));
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul_nt lhs");
    require_2d(b, "matmul_nt rhs");
    if (a.extent(1) != b.extent(1))
        throw DimensionError("matmul_nt inner extents differ: " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    Tensor out({a.extent(0), b.extent(0)});
    kernels::matmul_nt(a.data(), b.data(), out.data(), a.extent(0), a.extent(1), b.extent(0));
    return out;
}

Tensor transpose2d(const Tensor& a) {
    require_2d(a, "transpose2d");
    Tensor out({a.extent(1), a.extent(0)});
    for (int r = 0; r < a.extent(0); ++r)
        for (int c = 0; c < a.extent(1); ++c) out(c, r) = a(r, c);
    return out;
}

Tensor softmax_rows(const Tensor& m) {
    require_2d(m, "softmax_rows");
    const int rows = m.extent(0), cols = m.extent(1);
    Tensor out({rows, cols});
#pragma omp parallel for schedule(static) if (rows > 1)
    for (int r = 0; r < rows; ++r) {
        const float* in = m.data() + static_cast<long>(r) * cols;
        float* o = out.data() + static_cast<long>(r) * cols;
        float mx = in[0];
        for (int c = 1; c < cols; ++c) mx = std::max(mx, in[c]);
        double sum = 0.0;
        for (int c = 0; c < cols; ++c) {
            o[c] = std::exp(in[c] - mx);
            sum += o[c];
        }
        const float inv = static_cast<float>(1.0 / sum);
        for (int c = 0; c < cols; ++c) o[c] *= inv;
    }
    return out;
}

FeatureMap conv1x1(const FeatureMap& input, const Tensor& weight, const Tensor& bias) {
    require_2d(weight, "conv1x1 weight");
    if (weight.extent(1) != input.channels())
        throw DimensionError("conv1x1 channel mismatch: weight " + shape_str(weight.shape()) +
                             " vs input " + shape_str(input.t.shape()));
    if (bias.ndim() != 1 || bias.extent(0) != weight.extent(0))
        throw DimensionError("conv1x1 bias shape " + shape_str(bias.shape()) +
                             " does not match weight " + shape_str(weight.shape()));
    const int npx = input.height() * input.width();
    Tensor out({weight.extent(0), input.height(), input.width()});
    kernels::conv1x1(input.t.data(), weight.data(), bias.data(), out.data(), input.channels(),
                     weight.extent(0), npx);
    return FeatureMap(std::move(out), input.stride);
}

Tensor adaptive_avg_pool(const FeatureMap& input) {
    const int c = input.channels();
    const int npx = input.height() * input.width();
    Tensor out({c});
    for (int ch = 0; ch < c; ++ch) {
        const float* row = input.t.data() + static_cast<long>(ch) * npx;
        double sum = 0.0;
        for (int p = 0; p < npx; ++p) sum += row[p];
        out.data()[ch] = static_cast<float>(sum / npx);
    }
    return out;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    require_2d(weight, "linear weight");
    if (x.ndim() != 1 || x.extent(0) != weight.extent(1))
        throw DimensionError("linear input " + shape_str(x.shape()) + " does not match weight " +
                             shape_str(weight.shape()));
    if (bias.ndim() != 1 || bias.extent(0) != weight.extent(0))
        throw DimensionError("linear bias " + shape_str(bias.shape()) + " does not match weight " +
                             shape_str(weight.shape()));
    const int m = weight.extent(0), n = weight.extent(1);
    Tensor out({m});
    for (int r = 0; r < m; ++r) {
        const float* w = weight.data() + static_cast<long>(r) * n;
        float acc = bias.data()[r];
        for (int c = 0; c < n; ++c) acc += w[c] * x.data()[c];
        out.data()[r] = acc;
    }
    return out;
}

FeatureMap concat_channels(std::span<const FeatureMap> maps) {
    if (maps.empty()) throw DimensionError("concat_channels: no inputs");
    const int h = maps[0].height(), w = maps[0].width();
    int total = 0;
    for (const auto& m : maps) {
        if (m.height() != h || m.width() != w)
            throw DimensionError("concat_channels spatial mismatch: " + shape_str(m.t.shape()) +
                                 " vs " + shape_str(maps[0].t.shape()));
        total += m.channels();
    }
    Tensor out({total, h, w});
    float* dst = out.data();
    for (const auto& m : maps) {
        std::memcpy(dst, m.t.data(), sizeof(float) * static_cast<size_t>(m.t.numel()));
        dst += m.t.numel();
    }
    return FeatureMap(std::move(out), maps[0].stride);
}

FeatureMap spatial_pool(const FeatureMap& input, int r) {
    if (r < 1) throw DimensionError("spatial_pool ratio must be >= 1");
    if (r == 1) return input;
    const int c = input.channels(), h = input.height(), w = input.width();
    const int oh = (h + r - 1) / r, ow = (w + r - 1) / r;
    Tensor out({c, oh, ow});
#pragma omp parallel for schedule(static) if (c > 1)
    for (int ch = 0; ch < c; ++ch) {
        for (int y = 0; y < oh; ++y) {
            const int y0 = y * r, y1 = std::min(y0 + r, h);
            for (int x = 0; x < ow; ++x) {
                const int x0 = x * r, x1 = std::min(x0 + r, w);
                double sum = 0.0;
                for (int yy = y0; yy < y1; ++yy)
                    for (int xx = x0; xx < x1; ++xx) sum += input.t(ch, yy, xx);
                out(ch, y, x) = static_cast<float>(sum / ((y1 - y0) * (x1 - x0)));
            }
        }
    }
    return FeatureMap(std::move(out), input.stride * r);
}

Tensor flatten_spatial(const FeatureMap& input) {
    const int c = input.channels(), npx = input.height() * input.width();
    Tensor out({npx, c});
    const float* src = input.t.data();
#pragma omp parallel for schedule(static) if (npx > 64)
    for (int p = 0; p < npx; ++p) {
        float* row = out.data() + static_cast<long>(p) * c;
        for (int ch = 0; ch < c; ++ch) row[ch] = src[static_cast<long>(ch) * npx + p];
    }
    return out;
}

FeatureMap unflatten_spatial(const Tensor& rows, int h, int w, int stride) {
    require_2d(rows, "unflatten_spatial");
    if (rows.extent(0) != h * w)
        throw DimensionError("unflatten_spatial: " + std::to_string(rows.extent(0)) +
                             " rows do not factor as " + std::to_string(h) + "x" +
                             std::to_string(w));
    const int c = rows.extent(1), npx = h * w;
    Tensor out({c, h, w});
    float* dst = out.data();
#pragma omp parallel for schedule(static) if (npx > 64)
    for (int p = 0; p < npx; ++p) {
        const float* row = rows.data() + static_cast<long>(p) * c;
        for (int ch = 0; ch < c; ++ch) dst[static_cast<long>(ch) * npx + p] = row[ch];
    }
    return FeatureMap(std::move(out), stride);
}

}  // namespace tpat
