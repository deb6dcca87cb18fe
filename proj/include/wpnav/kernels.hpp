#pragma once

#include <cstdint>
#include <vector>

namespace wpnav::kernels {

// serial = reference implementation; parallel = OpenMP version with the same
// per-element accumulation order (bitwise-equal results); blas = OpenBLAS.
enum class Backend { serial, parallel, blas };

Backend& active_backend();
void set_blas_threads(int n);

// Row-major C[m,n] = alpha * op(A)[m,k] * op(B)[k,n] + beta * C[m,n].
// Leading dimensions are those of the stored (untransposed) matrices.
template <class T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc, Backend be);

template <class T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc) {
    gemm(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc, active_backend());
}

// "Same" padding before stride: out = ceil(in / stride), pad split with the
// extra pixel at the bottom/right.
struct ConvShape {
    int batch, in_h, in_w, in_c;
    int kernel, out_c, stride;
    int out_h() const { return (in_h + stride - 1) / stride; }
    int out_w() const { return (in_w + stride - 1) / stride; }
    int pad_h() const { return std::max((out_h() - 1) * stride + kernel - in_h, 0) / 2; }
    int pad_w() const { return std::max((out_w() - 1) * stride + kernel - in_w, 0) / 2; }
    std::int64_t col_rows() const { return std::int64_t(batch) * out_h() * out_w(); }
    int col_cols() const { return kernel * kernel * in_c; }
};

// NHWC image -> [batch*out_h*out_w, kernel*kernel*in_c] patch matrix
template <class T>
void im2col(const ConvShape& s, const T* image, T* col, Backend be);

// scatter-add transpose of im2col
template <class T>
void col2im(const ConvShape& s, const T* col, T* image, Backend be);

}  // namespace wpnav::kernels
