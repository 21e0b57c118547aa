#ifndef TPAT_TENSOR_HPP_
#define TPAT_TENSOR_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace tpat {

// Dense row-major float tensor. Ops hand back fresh tensors; nothing in the
// library mutates a tensor after returning it, so sharing across threads is
// safe.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, float fill = 0.f);
    Tensor(std::vector<int> shape, std::vector<float> values);

    int ndim() const { return static_cast<int>(shape_.size()); }
    int extent(int d) const { return shape_[static_cast<size_t>(d)]; }
    const std::vector<int>& shape() const { return shape_; }
    std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::span<const float> values() const { return data_; }

    // 2-D accessors (rows x cols).
    float& operator()(int r, int c) {
        return data_[static_cast<size_t>(r) * shape_[1] + static_cast<size_t>(c)];
    }
    float operator()(int r, int c) const {
        return data_[static_cast<size_t>(r) * shape_[1] + static_cast<size_t>(c)];
    }
    // 3-D accessors (c x h x w).
    float& operator()(int c, int h, int w) {
        return data_[(static_cast<size_t>(c) * shape_[1] + static_cast<size_t>(h)) * shape_[2] +
                     static_cast<size_t>(w)];
    }
    float operator()(int c, int h, int w) const {
        return data_[(static_cast<size_t>(c) * shape_[1] + static_cast<size_t>(h)) * shape_[2] +
                     static_cast<size_t>(w)];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

private:
    std::vector<int> shape_;
    std::vector<float> data_;
};

// Backbone/network activation map: channels x height x width plus the input
// stride (input pixels covered by one feature cell).
struct FeatureMap {
    Tensor t;
    int stride = 1;

    FeatureMap() = default;
    FeatureMap(Tensor tensor, int stride_px);

    int channels() const { return t.extent(0); }
    int height() const { return t.extent(1); }
    int width() const { return t.extent(2); }
};

// --- tensor ops ------------------------------------------------------------

// a[MxK] * b[KxN].
Tensor matmul(const Tensor& a, const Tensor& b);
// a[MxK] * b[NxK]^T; the natural layout for token/weight products.
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose2d(const Tensor& a);

// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& m);

// Per-pixel linear map: weight[C'xC], bias[C'].
FeatureMap conv1x1(const FeatureMap& input, const Tensor& weight, const Tensor& bias);

// Mean over the spatial extent; returns a C-vector (the C x 1 x 1 pooled map).
Tensor adaptive_avg_pool(const FeatureMap& input);

// weight[MxN] * x[N] + bias[M].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Channel concatenation of maps with identical spatial extents.
FeatureMap concat_channels(std::span<const FeatureMap> maps);

// Average pooling, window r x r, stride r, ceil-mode: edge cells average
// only the pixels that exist. r = 1 is the identity.
FeatureMap spatial_pool(const FeatureMap& input, int r);

// C x H x W -> (H*W) x C; row k is the channel vector at spatial index k
// (row-major). unflatten_spatial is the exact inverse.
Tensor flatten_spatial(const FeatureMap& input);
FeatureMap unflatten_spatial(const Tensor& rows, int h, int w, int stride);

}  // namespace tpat

#endif  // TPAT_TENSOR_HPP_
