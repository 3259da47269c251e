#pragma once

#include <cstddef>

#include "acx/core/matrix.hpp"

namespace acx::kernels {

enum class Trans { no, yes };

// Products below this many multiply-adds stay on the calling thread.
inline constexpr std::size_t kParallelWork = std::size_t{1} << 18;

/// C = op(A) * op(B). Rows of C are distributed over OpenMP threads once the
/// product is large enough. Each output row is accumulated in the same order
/// as gemm_serial, so both return bit-identical results.
Matrix gemm(const Matrix& a, const Matrix& b, Trans ta = Trans::no, Trans tb = Trans::no);

/// Single-threaded reference for gemm.
Matrix gemm_serial(const Matrix& a, const Matrix& b, Trans ta = Trans::no, Trans tb = Trans::no);

/// Textbook triple loop (i, j, k order, no zero skipping). Test oracle only.
Matrix gemm_naive(const Matrix& a, const Matrix& b);

} // namespace acx::kernels
