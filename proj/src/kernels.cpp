#include "tpat/kernels.hpp"

#include <cstring>

namespace tpat::kernels {

namespace serial {

void matmul(const float* a, const float* b, float* out, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        float* out_row = out + static_cast<long>(i) * n;
        std::memset(out_row, 0, sizeof(float) * n);
        for (int p = 0; p < k; ++p) {
            const float aip = a[static_cast<long>(i) * k + p];
            const float* b_row = b + static_cast<long>(p) * n;
            for (int j = 0; j < n; ++j) out_row[j] += aip * b_row[j];
        }
    }
}

void matmul_nt(const float* a, const float* b, float* out, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const float* a_row = a + static_cast<long>(i) * k;
        for (int j = 0; j < n; ++j) {
            const float* b_row = b + static_cast<long>(j) * k;
            float acc = 0.f;
            for (int p = 0; p < k; ++p) acc += a_row[p] * b_row[p];
            out[static_cast<long>(i) * n + j] = acc;
        }
    }
}

void conv1x1(const float* in, const float* w, const float* bias, float* out,
             int cin, int cout, int npx) {
    for (int co = 0; co < cout; ++co) {
        float* out_row = out + static_cast<long>(co) * npx;
        const float b = bias ? bias[co] : 0.f;
        for (int p = 0; p < npx; ++p) out_row[p] = b;
        const float* w_row = w + static_cast<long>(co) * cin;
        for (int ci = 0; ci < cin; ++ci) {
            const float wv = w_row[ci];
            const float* in_row = in + static_cast<long>(ci) * npx;
            for (int p = 0; p < npx; ++p) out_row[p] += wv * in_row[p];
        }
    }
}

}  // namespace serial

// Row-parallel i-k-j product: per output row the accumulation order equals
// the serial kernel's, so both agree to the last ulp of rounding order.
void matmul(const float* a, const float* b, float* out, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (m > 1)
    for (int i = 0; i < m; ++i) {
        float* out_row = out + static_cast<long>(i) * n;
        std::memset(out_row, 0, sizeof(float) * n);
        for (int p = 0; p < k; ++p) {
            const float aip = a[static_cast<long>(i) * k + p];
            const float* b_row = b + static_cast<long>(p) * n;
            for (int j = 0; j < n; ++j) out_row[j] += aip * b_row[j];
        }
    }
}

// Dot products with sixteen independent accumulator lanes; the fixed
// reassociation both vectorizes and keeps results run-to-run identical.
static float dot_lanes(const float* __restrict x, const float* __restrict y, int k) {
    float acc[16] = {};
    const int k16 = k & ~15;
    for (int p = 0; p < k16; p += 16)
        for (int u = 0; u < 16; ++u) acc[u] += x[p + u] * y[p + u];
    for (int p = k16; p < k; ++p) acc[p - k16] += x[p] * y[p];
    float even = 0.f, odd = 0.f;
    for (int u = 0; u < 16; u += 2) {
        even += acc[u];
        odd += acc[u + 1];
    }
    return even + odd;
}

void matmul_nt(const float* a, const float* b, float* out, int m, int k, int n) {
#pragma omp parallel for schedule(static) if (m > 1)
    for (int i = 0; i < m; ++i) {
        const float* a_row = a + static_cast<long>(i) * k;
        for (int j = 0; j < n; ++j)
            out[static_cast<long>(i) * n + j] =
                dot_lanes(a_row, b + static_cast<long>(j) * k, k);
    }
}

void conv1x1(const float* in, const float* w, const float* bias, float* out,
             int cin, int cout, int npx) {
#pragma omp parallel for schedule(static) if (cout > 1)
    for (int co = 0; co < cout; ++co) {
        float* out_row = out + static_cast<long>(co) * npx;
        const float b = bias ? bias[co] : 0.f;
        for (int p = 0; p < npx; ++p) out_row[p] = b;
        const float* w_row = w + static_cast<long>(co) * cin;
        for (int ci = 0; ci < cin; ++ci) {
            const float wv = w_row[ci];
            const float* in_row = in + static_cast<long>(ci) * npx;
            for (int p = 0; p < npx; ++p) out_row[p] += wv * in_row[p];
        }
    }
}

}  // namespace tpat::kernels
