// Times the OpenMP kernels against their serial references on the shapes
// the tracker actually runs, and prints the speedups.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tpat/kernels.hpp"
#include "tpat/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

std::vector<float> random_vec(size_t n, std::uint64_t seed) {
    std::vector<float> v(n);
    tpat::Rng rng(seed);
    for (float& x : v) x = rng.uniform(-1.f, 1.f);
    return v;
}

template <typename F>
double time_ms(F&& fn, int reps) {
    fn();  // warm-up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void bench_matmul(int m, int k, int n, int reps) {
    const auto a = random_vec(static_cast<size_t>(m) * k, 1);
    const auto b = random_vec(static_cast<size_t>(k) * n, 2);
    std::vector<float> out(static_cast<size_t>(m) * n);
    const double serial =
        time_ms([&] { tpat::kernels::serial::matmul(a.data(), b.data(), out.data(), m, k, n); },
                reps);
    const double parallel =
        time_ms([&] { tpat::kernels::matmul(a.data(), b.data(), out.data(), m, k, n); }, reps);
    std::printf("matmul    %4dx%4dx%4d  serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n", m,
                k, n, serial, parallel, serial / parallel);
}

void bench_matmul_nt(int m, int k, int n, int reps) {
    const auto a = random_vec(static_cast<size_t>(m) * k, 3);
    const auto b = random_vec(static_cast<size_t>(n) * k, 4);
    std::vector<float> out(static_cast<size_t>(m) * n);
    const double serial = time_ms(
        [&] { tpat::kernels::serial::matmul_nt(a.data(), b.data(), out.data(), m, k, n); }, reps);
    const double parallel =
        time_ms([&] { tpat::kernels::matmul_nt(a.data(), b.data(), out.data(), m, k, n); }, reps);
    std::printf("matmul_nt %4dx%4dx%4d  serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n", m,
                k, n, serial, parallel, serial / parallel);
}

void bench_conv(int cin, int cout, int npx, int reps) {
    const auto in = random_vec(static_cast<size_t>(cin) * npx, 5);
    const auto w = random_vec(static_cast<size_t>(cout) * cin, 6);
    const auto bias = random_vec(static_cast<size_t>(cout), 7);
    std::vector<float> out(static_cast<size_t>(cout) * npx);
    const double serial = time_ms(
        [&] {
            tpat::kernels::serial::conv1x1(in.data(), w.data(), bias.data(), out.data(), cin,
                                           cout, npx);
        },
        reps);
    const double parallel = time_ms(
        [&] {
            tpat::kernels::conv1x1(in.data(), w.data(), bias.data(), out.data(), cin, cout, npx);
        },
        reps);
    std::printf("conv1x1   %4d->%3d @%5dpx serial %8.3f ms  parallel %8.3f ms  speedup %.2fx\n",
                cin, cout, npx, serial, parallel, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both variants run serially\n");
#endif
    // Token projections and attention products at search resolution.
    bench_matmul(400, 192, 192, 20);
    bench_matmul(400, 100, 192, 20);
    bench_matmul_nt(400, 192, 768, 10);
    bench_matmul_nt(400, 960, 192, 10);
    // Stage adaptation and head towers.
    bench_conv(232, 192, 400, 20);
    bench_conv(116, 192, 1600, 10);
    bench_conv(192, 192, 400, 20);
    return 0;
}
