#include "acx/core/kernels.hpp"

#include <cstdint>

#include "acx/core/error.hpp"

namespace acx::kernels {
namespace {

struct Dims {
    std::size_t m, k, n;
};

Dims check(const Matrix& a, const Matrix& b, Trans ta, Trans tb) {
    const std::size_t am = ta == Trans::no ? a.rows() : a.cols();
    const std::size_t ak = ta == Trans::no ? a.cols() : a.rows();
    const std::size_t bk = tb == Trans::no ? b.rows() : b.cols();
    const std::size_t bn = tb == Trans::no ? b.cols() : b.rows();
    if (ak != bk) {
        throw DimensionError("matmul: inner dimensions differ, " + shape_string(am, ak) + " x " +
                             shape_string(bk, bn));
    }
    return {am, ak, bn};
}

// Row i of op(A) * op(B), written into out (length n, zero on entry).
inline void gemm_row(const Matrix& a, const Matrix& b, Trans ta, Trans tb, const Dims& d,
                     std::size_t i, double* out) {
    if (tb == Trans::no) {
        for (std::size_t k = 0; k < d.k; ++k) {
            const double av = ta == Trans::no ? a(i, k) : a(k, i);
            if (av == 0.0) continue;
            const double* brow = b.row(k).data();
            for (std::size_t j = 0; j < d.n; ++j) out[j] += av * brow[j];
        }
    } else {
        for (std::size_t j = 0; j < d.n; ++j) {
            const double* brow = b.row(j).data();
            double acc = 0.0;
            for (std::size_t k = 0; k < d.k; ++k) {
                const double av = ta == Trans::no ? a(i, k) : a(k, i);
                acc += av * brow[k];
            }
            out[j] = acc;
        }
    }
}

} // namespace

Matrix gemm(const Matrix& a, const Matrix& b, Trans ta, Trans tb) {
    const Dims d = check(a, b, ta, tb);
    Matrix c(d.m, d.n);
    const auto rows = static_cast<std::int64_t>(d.m);
    const bool big = d.m * d.k * d.n >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
    for (std::int64_t i = 0; i < rows; ++i) {
        gemm_row(a, b, ta, tb, d, static_cast<std::size_t>(i), c.row(static_cast<std::size_t>(i)).data());
    }
    return c;
}

Matrix gemm_serial(const Matrix& a, const Matrix& b, Trans ta, Trans tb) {
    const Dims d = check(a, b, ta, tb);
    Matrix c(d.m, d.n);
    for (std::size_t i = 0; i < d.m; ++i) gemm_row(a, b, ta, tb, d, i, c.row(i).data());
    return c;
}

Matrix gemm_naive(const Matrix& a, const Matrix& b) {
    check(a, b, Trans::no, Trans::no);
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

} // namespace acx::kernels
