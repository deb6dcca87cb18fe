#include "wpnav/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include <cblas.h>
#include <omp.h>

extern "C" void openblas_set_num_threads(int);

namespace wpnav::kernels {

Backend& active_backend() {
    static Backend be = Backend::blas;
    return be;
}

void set_blas_threads(int n) { openblas_set_num_threads(n); }

namespace {

// C[m,n] += alpha * A[m,k] * B[k,n], A/B already untransposed, C pre-scaled.
template <class T>
void gemm_nn_rows(int i_begin, int i_end, int n, int k, T alpha, const T* a, int lda, const T* b,
                  int ldb, T* c, int ldc) {
    for (int i = i_begin; i < i_end; ++i) {
        T* crow = c + std::int64_t(i) * ldc;
        const T* arow = a + std::int64_t(i) * lda;
        for (int p = 0; p < k; ++p) {
            const T aval = alpha * arow[p];
            const T* brow = b + std::int64_t(p) * ldb;
#pragma omp simd
            for (int j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
}

template <class T>
void scale_c(int m, int n, T beta, T* c, int ldc) {
    for (int i = 0; i < m; ++i) {
        T* crow = c + std::int64_t(i) * ldc;
        if (beta == T(0)) std::fill(crow, crow + n, T(0));
        else if (beta != T(1))
            for (int j = 0; j < n; ++j) crow[j] *= beta;
    }
}

template <class T>
std::vector<T> pack_transpose(const T* a, int rows, int cols, int lda) {
    // returns a^T as a dense (cols x rows) matrix
    std::vector<T> out(std::size_t(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out[std::size_t(j) * rows + i] = a[std::int64_t(i) * lda + j];
    return out;
}

template <class T>
void gemm_hand(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda,
               const T* b, int ldb, T beta, T* c, int ldc, bool parallel) {
    // reduce every case to NN by packing transposed inputs
    std::vector<T> a_packed, b_packed;
    const T* a_nn = a;
    int lda_nn = lda;
    if (trans_a) {
        a_packed = pack_transpose(a, k, m, lda);  // stored a is k x m
        a_nn = a_packed.data();
        lda_nn = k;
    }
    const T* b_nn = b;
    int ldb_nn = ldb;
    if (trans_b) {
        b_packed = pack_transpose(b, n, k, ldb);  // stored b is n x k
        b_nn = b_packed.data();
        ldb_nn = n;
    }
    scale_c(m, n, beta, c, ldc);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < m; ++i) gemm_nn_rows(i, i + 1, n, k, alpha, a_nn, lda_nn, b_nn, ldb_nn, c, ldc);
    } else {
        gemm_nn_rows(0, m, n, k, alpha, a_nn, lda_nn, b_nn, ldb_nn, c, ldc);
    }
}

void gemm_blas(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
               int lda, const float* b, int ldb, float beta, float* c, int ldc) {
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm_blas(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
               int lda, const double* b, int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace

template <class T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc, Backend be) {
    if (m <= 0 || n <= 0) return;
    switch (be) {
        case Backend::serial:
            gemm_hand(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc, false);
            break;
        case Backend::parallel:
            gemm_hand(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc, true);
            break;
        case Backend::blas:
            gemm_blas(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
            break;
    }
}

template void gemm<float>(bool, bool, int, int, int, float, const float*, int, const float*, int,
                          float, float*, int, Backend);
template void gemm<double>(bool, bool, int, int, int, double, const double*, int, const double*,
                           int, double, double*, int, Backend);

namespace {

template <class T>
void im2col_image(const ConvShape& s, const T* image, T* col, int nimg) {
    const int oh = s.out_h(), ow = s.out_w();
    const int ph = s.pad_h(), pw = s.pad_w();
    const std::int64_t img_stride = std::int64_t(s.in_h) * s.in_w * s.in_c;
    const T* img = image + nimg * img_stride;
    T* dst = col + std::int64_t(nimg) * oh * ow * s.col_cols();
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int ky = 0; ky < s.kernel; ++ky) {
                const int iy = oy * s.stride - ph + ky;
                for (int kx = 0; kx < s.kernel; ++kx) {
                    const int ix = ox * s.stride - pw + kx;
                    if (iy >= 0 && iy < s.in_h && ix >= 0 && ix < s.in_w) {
                        std::memcpy(dst, img + (std::int64_t(iy) * s.in_w + ix) * s.in_c,
                                    sizeof(T) * s.in_c);
                    } else {
                        std::fill(dst, dst + s.in_c, T(0));
                    }
                    dst += s.in_c;
                }
            }
        }
    }
}

template <class T>
void col2im_image(const ConvShape& s, const T* col, T* image, int nimg) {
    const int oh = s.out_h(), ow = s.out_w();
    const int ph = s.pad_h(), pw = s.pad_w();
    const std::int64_t img_stride = std::int64_t(s.in_h) * s.in_w * s.in_c;
    T* img = image + nimg * img_stride;
    std::fill(img, img + img_stride, T(0));
    const T* src = col + std::int64_t(nimg) * oh * ow * s.col_cols();
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int ky = 0; ky < s.kernel; ++ky) {
                const int iy = oy * s.stride - ph + ky;
                for (int kx = 0; kx < s.kernel; ++kx) {
                    const int ix = ox * s.stride - pw + kx;
                    if (iy >= 0 && iy < s.in_h && ix >= 0 && ix < s.in_w) {
                        T* dst = img + (std::int64_t(iy) * s.in_w + ix) * s.in_c;
                        for (int ci = 0; ci < s.in_c; ++ci) dst[ci] += src[ci];
                    }
                    src += s.in_c;
                }
            }
        }
    }
}

}  // namespace

template <class T>
void im2col(const ConvShape& s, const T* image, T* col, Backend be) {
    if (be == Backend::parallel) {
#pragma omp parallel for schedule(static)
        for (int nimg = 0; nimg < s.batch; ++nimg) im2col_image(s, image, col, nimg);
    } else {
        for (int nimg = 0; nimg < s.batch; ++nimg) im2col_image(s, image, col, nimg);
    }
}

template <class T>
void col2im(const ConvShape& s, const T* col, T* image, Backend be) {
    if (be == Backend::parallel) {
#pragma omp parallel for schedule(static)
        for (int nimg = 0; nimg < s.batch; ++nimg) col2im_image(s, col, image, nimg);
    } else {
        for (int nimg = 0; nimg < s.batch; ++nimg) col2im_image(s, col, image, nimg);
    }
}

template void im2col<float>(const ConvShape&, const float*, float*, Backend);
template void im2col<double>(const ConvShape&, const double*, double*, Backend);
template void col2im<float>(const ConvShape&, const float*, float*, Backend);
template void col2im<double>(const ConvShape&, const double*, double*, Backend);

}  // namespace wpnav::kernels
