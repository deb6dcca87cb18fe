// Compares the serial reference kernels against the OpenMP and BLAS backends
// at the matrix shapes the training loops actually use.

#include <chrono>
#include <cstring>
#include <iostream>
#include <vector>

#include "wpnav/common.hpp"
#include "wpnav/kernels.hpp"

using namespace wpnav;
using kernels::Backend;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

const char* name(Backend be) {
    switch (be) {
        case Backend::serial: return "serial";
        case Backend::parallel: return "openmp";
        case Backend::blas: return "blas";
    }
    return "?";
}

void bench_gemm(int m, int k, int n, int reps) {
    Rng rng(7);
    std::vector<float> a(std::size_t(m) * k), b(std::size_t(k) * n), c(std::size_t(m) * n);
    for (auto& v : a) v = float(rng.uniform(-1, 1));
    for (auto& v : b) v = float(rng.uniform(-1, 1));
    std::printf("gemm %5dx%4dx%4d:", m, k, n);
    for (Backend be : {Backend::serial, Backend::parallel, Backend::blas}) {
        kernels::gemm<float>(false, false, m, n, k, 1.0f, a.data(), k, b.data(), n, 0.0f,
                             c.data(), n, be);
        const double t0 = now_s();
        for (int r = 0; r < reps; ++r)
            kernels::gemm<float>(false, false, m, n, k, 1.0f, a.data(), k, b.data(), n, 0.0f,
                                 c.data(), n, be);
        const double dt = now_s() - t0;
        std::printf("  %s %7.2f GFLOP/s", name(be), 2.0 * m * k * n * reps / dt / 1e9);
    }
    std::printf("\n");
}

void bench_conv(int batch, int reps) {
    kernels::ConvShape s{batch, 64, 64, 6, 3, 32, 2};
    Rng rng(9);
    std::vector<float> img(std::size_t(batch) * 64 * 64 * 6);
    for (auto& v : img) v = float(rng.uniform(0, 1));
    std::vector<float> col(std::size_t(s.col_rows()) * s.col_cols());
    std::printf("im2col b=%3d 64x64x6 k3 s2:", batch);
    for (Backend be : {Backend::serial, Backend::parallel}) {
        kernels::im2col(s, img.data(), col.data(), be);
        const double t0 = now_s();
        for (int r = 0; r < reps; ++r) kernels::im2col(s, img.data(), col.data(), be);
        const double dt = now_s() - t0;
        std::printf("  %s %7.1f ms", name(be), dt / reps * 1e3);
    }
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    kernels::set_blas_threads(1);
    const int reps = quick ? 5 : 200;
    bench_gemm(256, 37, 256, reps);
    bench_gemm(256, 256, 256, reps);
    bench_gemm(512, 256, 256, reps);
    if (!quick) bench_gemm(4096, 54, 32, reps);
    bench_conv(quick ? 8 : 64, quick ? 3 : 20);

    // cross-backend agreement at one shape
    Rng rng(3);
    const int m = 64, k = 96, n = 80;
    std::vector<float> a(m * k), b(k * n), cs(m * n), cp(m * n), cb(m * n);
    for (auto& v : a) v = float(rng.uniform(-1, 1));
    for (auto& v : b) v = float(rng.uniform(-1, 1));
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, cs.data(), n,
                         Backend::serial);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, cp.data(), n,
                         Backend::parallel);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, cb.data(), n,
                         Backend::blas);
    double max_par = 0, max_blas = 0;
    for (int i = 0; i < m * n; ++i) {
        max_par = std::max(max_par, double(std::abs(cp[i] - cs[i])));
        max_blas = std::max(max_blas, double(std::abs(cb[i] - cs[i])));
    }
    std::printf("agreement vs serial: openmp max|d|=%g, blas max|d|=%g\n", max_par, max_blas);
    return (max_par == 0.0 && max_blas < 1e-4) ? 0 : 1;
}
