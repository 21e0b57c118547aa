#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "tpat/errors.hpp"
#include "tpat/kernels.hpp"
#include "tpat/rng.hpp"
#include "tpat/tensor.hpp"

using namespace tpat;

namespace {

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed, float lo = -2.f, float hi = 2.f) {
    Tensor t(std::move(shape));
    Rng rng(seed);
    for (std::int64_t i = 0; i < t.numel(); ++i) t.data()[i] = rng.uniform(lo, hi);
    return t;
}

FeatureMap random_map(int c, int h, int w, std::uint64_t seed, int stride = 16) {
    return FeatureMap(random_tensor({c, h, w}, seed), stride);
}

// Brute-force triple loop, the oracle for every matmul-backed op.
Tensor matmul_oracle(const Tensor& a, const Tensor& b) {
    Tensor out({a.extent(0), b.extent(1)});
    for (int i = 0; i < a.extent(0); ++i)
        for (int j = 0; j < b.extent(1); ++j) {
            float acc = 0.f;
            for (int p = 0; p < a.extent(1); ++p) acc += a(i, p) * b(p, j);
            out(i, j) = acc;
        }
    return out;
}

void check_close(const Tensor& got, const Tensor& want, double tol) {
    REQUIRE(got.shape() == want.shape());
    for (std::int64_t i = 0; i < got.numel(); ++i)
        CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(tol).scale(1.0));
}

}  // namespace

TEST_CASE("matmul identity and scalar cases") {
    Tensor eye({3, 3});
    for (int i = 0; i < 3; ++i) eye(i, i) = 1.f;
    Tensor b = random_tensor({3, 7}, 11);
    check_close(matmul(eye, b), b, 1e-7);

    Tensor s1({1, 1}, {2.f}), s2({1, 1}, {3.f});
    CHECK(matmul(s1, s2)(0, 0) == 6.f);
}

TEST_CASE("matmul against triple-loop oracle") {
    Tensor a = random_tensor({7, 5}, 21);
    Tensor b = random_tensor({5, 4}, 22);
    check_close(matmul(a, b), matmul_oracle(a, b), 1e-5);
}

TEST_CASE("matmul shape mismatch names both shapes") {
    Tensor a = random_tensor({3, 4}, 1);
    Tensor b = random_tensor({5, 2}, 2);
    try {
        matmul(a, b);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[3x4]") != std::string::npos);
        CHECK(msg.find("[5x2]") != std::string::npos);
    }
}

TEST_CASE("matmul_nt equals matmul with transposed rhs") {
    Tensor a = random_tensor({9, 13}, 31);
    Tensor b = random_tensor({6, 13}, 32);
    check_close(matmul_nt(a, b), matmul_oracle(a, transpose2d(b)), 1e-5);
}

TEST_CASE("parallel kernels agree with serial references") {
    Rng rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        const int m = rng.uniform_int(1, 40), k = rng.uniform_int(1, 70),
                  n = rng.uniform_int(1, 40);
        Tensor a = random_tensor({m, k}, 100 + trial);
        Tensor b = random_tensor({k, n}, 200 + trial);
        Tensor bt = transpose2d(b);
        std::vector<float> out_p(static_cast<size_t>(m) * n), out_s(out_p.size());
        kernels::matmul(a.data(), b.data(), out_p.data(), m, k, n);
        kernels::serial::matmul(a.data(), b.data(), out_s.data(), m, k, n);
        for (size_t i = 0; i < out_p.size(); ++i)
            CHECK(out_p[i] == doctest::Approx(out_s[i]).epsilon(1e-5).scale(1.0));

        kernels::matmul_nt(a.data(), bt.data(), out_p.data(), m, k, n);
        kernels::serial::matmul_nt(a.data(), bt.data(), out_s.data(), m, k, n);
        for (size_t i = 0; i < out_p.size(); ++i)
            CHECK(out_p[i] == doctest::Approx(out_s[i]).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("softmax uniform and single-element rows") {
    Tensor z({1, 4});
    Tensor s = softmax_rows(z);
    for (int c = 0; c < 4; ++c) CHECK(s(0, c) == doctest::Approx(0.25).epsilon(1e-7));

    Tensor one({1, 1}, {3.7f});
    CHECK(softmax_rows(one)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("softmax shift invariance and row normalization") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = rng.uniform_int(1, 6), cols = rng.uniform_int(1, 9);
        Tensor m = random_tensor({rows, cols}, 300 + trial, -30.f, 30.f);
        Tensor shifted = m;
        const float k = rng.uniform(-50.f, 50.f);
        for (std::int64_t i = 0; i < shifted.numel(); ++i) shifted.data()[i] += k;

        Tensor sm = softmax_rows(m);
        Tensor sm2 = softmax_rows(shifted);
        for (int r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < cols; ++c) {
                sum += sm(r, c);
                CHECK(sm(r, c) >= 0.f);
                CHECK(sm(r, c) == doctest::Approx(sm2(r, c)).epsilon(1e-6).scale(1.0));
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        }
        CHECK(sm.all_finite());
    }
}

TEST_CASE("conv1x1 identity weights pass input through") {
    FeatureMap in = random_map(4, 3, 5, 41, 8);
    Tensor eye({4, 4});
    for (int i = 0; i < 4; ++i) eye(i, i) = 1.f;
    FeatureMap out = conv1x1(in, eye, Tensor({4}));
    check_close(out.t, in.t, 1e-7);
    CHECK(out.stride == in.stride);
}

TEST_CASE("conv1x1 paper channel counts") {
    FeatureMap in = random_map(232, 5, 5, 42);
    Tensor w = random_tensor({192, 232}, 43);
    FeatureMap out = conv1x1(in, w, random_tensor({192}, 44));
    CHECK(out.t.shape() == std::vector<int>{192, 5, 5});
}

TEST_CASE("conv1x1 equals per-pixel matmul oracle") {
    FeatureMap in = random_map(6, 4, 3, 51);
    Tensor w = random_tensor({5, 6}, 52);
    Tensor b = random_tensor({5}, 53);
    FeatureMap out = conv1x1(in, w, b);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 3; ++x)
            for (int co = 0; co < 5; ++co) {
                float acc = b.data()[co];
                for (int ci = 0; ci < 6; ++ci) acc += w(co, ci) * in.t(ci, y, x);
                CHECK(out.t(co, y, x) == doctest::Approx(acc).epsilon(1e-5).scale(1.0));
            }
}

TEST_CASE("conv1x1 equals flatten-matmul-unflatten") {
    FeatureMap in = random_map(7, 5, 6, 61);
    Tensor w = random_tensor({3, 7}, 62);
    Tensor b = random_tensor({3}, 63);
    FeatureMap direct = conv1x1(in, w, b);
    Tensor rows = matmul_nt(flatten_spatial(in), w);
    for (int r = 0; r < rows.extent(0); ++r)
        for (int c = 0; c < 3; ++c) rows(r, c) += b.data()[c];
    FeatureMap via = unflatten_spatial(rows, 5, 6, in.stride);
    check_close(direct.t, via.t, 1e-5);
}

TEST_CASE("conv1x1 channel mismatch raises") {
    FeatureMap in = random_map(4, 2, 2, 71);
    CHECK_THROWS_AS(conv1x1(in, random_tensor({5, 3}, 72), Tensor({5})), DimensionError);
}

TEST_CASE("adaptive_avg_pool constant and identity cases") {
    FeatureMap constant(Tensor({3, 4, 4}, 2.5f), 8);
    Tensor pooled = adaptive_avg_pool(constant);
    for (int c = 0; c < 3; ++c) CHECK(pooled.data()[c] == doctest::Approx(2.5));

    FeatureMap single = random_map(5, 1, 1, 81);
    Tensor p1 = adaptive_avg_pool(single);
    for (int c = 0; c < 5; ++c) CHECK(p1.data()[c] == single.t(c, 0, 0));
}

TEST_CASE("adaptive_avg_pool equals explicit mean oracle") {
    FeatureMap in = random_map(3, 4, 4, 91);
    Tensor pooled = adaptive_avg_pool(in);
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) sum += in.t(c, y, x);
        CHECK(pooled.data()[c] == doctest::Approx(sum / 16.0).epsilon(1e-6));
    }
}

TEST_CASE("linear identity, zero weight, and dot oracle") {
    Tensor x = random_tensor({4}, 101);
    Tensor eye({4, 4});
    for (int i = 0; i < 4; ++i) eye(i, i) = 1.f;
    check_close(linear(x, eye, Tensor({4})), x, 1e-7);

    Tensor bias = random_tensor({3}, 102);
    check_close(linear(x, Tensor({3, 4}), bias), bias, 1e-7);

    Tensor w = random_tensor({3, 4}, 103);
    Tensor out = linear(x, w, bias);
    for (int r = 0; r < 3; ++r) {
        float acc = bias.data()[r];
        for (int c = 0; c < 4; ++c) acc += w(r, c) * x.data()[c];
        CHECK(out.data()[r] == doctest::Approx(acc).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("concat_channels identity, block order, and recovery") {
    FeatureMap one = random_map(3, 2, 2, 111);
    std::vector<FeatureMap> single{one};
    check_close(concat_channels(single).t, one.t, 0.0);

    std::vector<FeatureMap> five;
    for (int i = 0; i < 5; ++i) five.push_back(random_map(192, 5, 5, 120 + i));
    FeatureMap cat = concat_channels(five);
    CHECK(cat.t.shape() == std::vector<int>{960, 5, 5});
    for (int k = 0; k < 5; ++k)
        for (int c = 0; c < 192; c += 37)
            for (int y = 0; y < 5; ++y)
                for (int x = 0; x < 5; ++x)
                    REQUIRE(cat.t(k * 192 + c, y, x) == five[k].t(c, y, x));
}

TEST_CASE("concat_channels spatial mismatch raises") {
    std::vector<FeatureMap> maps{random_map(2, 3, 3, 131), random_map(2, 3, 4, 132)};
    CHECK_THROWS_AS(concat_channels(maps), DimensionError);
}

TEST_CASE("spatial_pool identity, constant, and block-mean oracle") {
    FeatureMap in = random_map(3, 5, 7, 141);
    FeatureMap same = spatial_pool(in, 1);
    check_close(same.t, in.t, 0.0);

    FeatureMap constant(Tensor({2, 5, 5}, 1.25f), 16);
    FeatureMap pooled = spatial_pool(constant, 2);
    CHECK(pooled.t.shape() == std::vector<int>{2, 3, 3});
    CHECK(pooled.stride == 32);
    for (std::int64_t i = 0; i < pooled.t.numel(); ++i)
        CHECK(pooled.t.data()[i] == doctest::Approx(1.25));

    FeatureMap m = random_map(1, 4, 4, 142);
    FeatureMap p2 = spatial_pool(m, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) {
            const float want = (m.t(0, 2 * y, 2 * x) + m.t(0, 2 * y, 2 * x + 1) +
                                m.t(0, 2 * y + 1, 2 * x) + m.t(0, 2 * y + 1, 2 * x + 1)) /
                               4.f;
            CHECK(p2.t(0, y, x) == doctest::Approx(want).epsilon(1e-6));
        }
}

TEST_CASE("flatten_spatial shapes and round trip") {
    FeatureMap in = random_map(192, 5, 5, 151);
    Tensor rows = flatten_spatial(in);
    CHECK(rows.shape() == std::vector<int>{25, 192});
    FeatureMap back = unflatten_spatial(rows, 5, 5, in.stride);
    check_close(back.t, in.t, 0.0);

    FeatureMap px = random_map(6, 1, 1, 152);
    CHECK(flatten_spatial(px).shape() == std::vector<int>{1, 6});

    // Row k holds the channel vector at spatial index k.
    CHECK(rows(7, 3) == in.t(3, 1, 2));
}

TEST_CASE("unflatten with non-factorable extent raises") {
    Tensor rows = random_tensor({24, 4}, 161);
    CHECK_THROWS_AS(unflatten_spatial(rows, 5, 5, 8), DimensionError);
}

TEST_CASE("ops keep finite inputs finite") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        FeatureMap a = random_map(rng.uniform_int(1, 8), rng.uniform_int(1, 7),
                                  rng.uniform_int(1, 7), 400 + trial);
        CHECK(spatial_pool(a, rng.uniform_int(1, 3)).t.all_finite());
        CHECK(adaptive_avg_pool(a).all_finite());
        CHECK(flatten_spatial(a).all_finite());
        Tensor m = random_tensor({rng.uniform_int(1, 6), rng.uniform_int(1, 6)}, 500 + trial,
                                 -80.f, 80.f);
        CHECK(softmax_rows(m).all_finite());
    }
}
