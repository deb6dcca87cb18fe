#include <gtest/gtest.h>

#include "wpnav/common.hpp"
#include "wpnav/kernels.hpp"

using namespace wpnav;
using kernels::Backend;

namespace {

std::vector<float> random_vec(std::size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = float(rng.uniform(-1.0, 1.0));
    return v;
}

}  // namespace

TEST(Gemm, ParallelMatchesSerialBitwise) {
    Rng rng(11);
    for (int trans = 0; trans < 4; ++trans) {
        const bool ta = trans & 1, tb = trans & 2;
        const int m = 33, n = 47, k = 29;
        const auto a = random_vec(std::size_t(m) * k, rng);
        const auto b = random_vec(std::size_t(k) * n, rng);
        std::vector<float> cs(std::size_t(m) * n, 0.5f), cp(std::size_t(m) * n, 0.5f);
        const int lda = ta ? m : k, ldb = tb ? k : n;
        kernels::gemm<float>(ta, tb, m, n, k, 1.25f, a.data(), lda, b.data(), ldb, 0.5f, cs.data(),
                             n, Backend::serial);
        kernels::gemm<float>(ta, tb, m, n, k, 1.25f, a.data(), lda, b.data(), ldb, 0.5f, cp.data(),
                             n, Backend::parallel);
        for (std::size_t i = 0; i < cs.size(); ++i) ASSERT_EQ(cs[i], cp[i]) << "combo " << trans;
    }
}

TEST(Gemm, BlasMatchesSerialClosely) {
    Rng rng(12);
    const int m = 64, n = 96, k = 128;
    const auto a = random_vec(std::size_t(m) * k, rng);
    const auto b = random_vec(std::size_t(k) * n, rng);
    std::vector<float> cs(std::size_t(m) * n, 0.f), cb(std::size_t(m) * n, 0.f);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, cs.data(), n,
                         Backend::serial);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, cb.data(), n,
                         Backend::blas);
    for (std::size_t i = 0; i < cs.size(); ++i)
        ASSERT_NEAR(cs[i], cb[i], 1e-4) << "at " << i;
}

TEST(Gemm, BlasDeterministicAcrossCalls) {
    Rng rng(13);
    const int m = 128, n = 128, k = 128;
    const auto a = random_vec(std::size_t(m) * k, rng);
    const auto b = random_vec(std::size_t(k) * n, rng);
    std::vector<float> c1(std::size_t(m) * n), c2(std::size_t(m) * n);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, c1.data(), n,
                         Backend::blas);
    kernels::gemm<float>(false, false, m, n, k, 1.f, a.data(), k, b.data(), n, 0.f, c2.data(), n,
                         Backend::blas);
    ASSERT_EQ(c1, c2);
}

TEST(Gemm, KnownTinyProduct) {
    // [1 2; 3 4] * [5 6; 7 8] = [19 22; 43 50]
    const std::vector<double> a{1, 2, 3, 4}, b{5, 6, 7, 8};
    std::vector<double> c(4, 0.0);
    kernels::gemm<double>(false, false, 2, 2, 2, 1.0, a.data(), 2, b.data(), 2, 0.0, c.data(), 2,
                          Backend::serial);
    EXPECT_DOUBLE_EQ(c[0], 19);
    EXPECT_DOUBLE_EQ(c[1], 22);
    EXPECT_DOUBLE_EQ(c[2], 43);
    EXPECT_DOUBLE_EQ(c[3], 50);
}

TEST(ConvShape, SamePaddingProgression) {
    kernels::ConvShape s1{1, 64, 64, 6, 3, 32, 2};
    EXPECT_EQ(s1.out_h(), 32);
    kernels::ConvShape s2{1, 32, 32, 32, 3, 64, 2};
    EXPECT_EQ(s2.out_h(), 16);
    kernels::ConvShape s3{1, 16, 16, 64, 3, 64, 2};
    EXPECT_EQ(s3.out_h(), 8);
    kernels::ConvShape s4{1, 7, 7, 4, 3, 8, 1};
    EXPECT_EQ(s4.out_h(), 7);
    EXPECT_EQ(s4.pad_h(), 1);
}

TEST(Im2Col, AdjointOfCol2Im) {
    // <im2col(x), y> == <x, col2im(y)> pins the scatter as the exact adjoint
    Rng rng(21);
    kernels::ConvShape s{2, 9, 7, 3, 3, 5, 2};
    const std::size_t img_n = std::size_t(s.batch) * s.in_h * s.in_w * s.in_c;
    const std::size_t col_n = std::size_t(s.col_rows()) * s.col_cols();
    std::vector<double> x(img_n), y(col_n), colx(col_n), imy(img_n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : y) v = rng.uniform(-1, 1);
    kernels::im2col(s, x.data(), colx.data(), Backend::serial);
    kernels::col2im(s, y.data(), imy.data(), Backend::serial);
    double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < col_n; ++i) lhs += colx[i] * y[i];
    for (std::size_t i = 0; i < img_n; ++i) rhs += x[i] * imy[i];
    EXPECT_NEAR(lhs, rhs, 1e-9);
}

TEST(Im2Col, ParallelMatchesSerial) {
    Rng rng(22);
    kernels::ConvShape s{3, 16, 16, 4, 3, 8, 2};
    std::vector<float> img(std::size_t(s.batch) * s.in_h * s.in_w * s.in_c);
    for (auto& v : img) v = float(rng.uniform(-1, 1));
    std::vector<float> c1(std::size_t(s.col_rows()) * s.col_cols());
    std::vector<float> c2(c1.size());
    kernels::im2col(s, img.data(), c1.data(), Backend::serial);
    kernels::im2col(s, img.data(), c2.data(), Backend::parallel);
    ASSERT_EQ(c1, c2);
}
