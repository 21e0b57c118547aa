#ifndef TPAT_KERNELS_HPP_
#define TPAT_KERNELS_HPP_

// Hot numeric kernels. The default entry points are OpenMP-parallel; the
// tpat::kernels::serial namespace keeps straight-line reference versions
// that the tests and the kernel benchmark compare against.
//
// Every parallel kernel writes each output element from exactly one thread,
// so results do not depend on the schedule or the thread count.

namespace tpat::kernels {

// out[m x n] = a[m x k] * b[k x n], row-major.
void matmul(const float* a, const float* b, float* out, int m, int k, int n);

// out[m x n] = a[m x k] * b[n x k]^T, row-major.
void matmul_nt(const float* a, const float* b, float* out, int m, int k, int n);

// out[co][p] = sum_ci w[co][ci] * in[ci][p] + bias[co], p = 0..npx-1.
// Maps are stored channel-major, i.e. in has cin rows of npx pixels.
void conv1x1(const float* in, const float* w, const float* bias, float* out,
             int cin, int cout, int npx);

namespace serial {
void matmul(const float* a, const float* b, float* out, int m, int k, int n);
void matmul_nt(const float* a, const float* b, float* out, int m, int k, int n);
void conv1x1(const float* in, const float* w, const float* bias, float* out,
             int cin, int cout, int npx);
}  // namespace serial

}  // namespace tpat::kernels

#endif  // TPAT_KERNELS_HPP_
