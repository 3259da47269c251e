#pragma once

#include <cstddef>
#include <span>

#include "acx/core/tape.hpp"

namespace acx::ad {

// Log arguments and probabilities are clamped to [kLogEps, 1 - kLogEps].
inline constexpr double kLogEps = 1e-7;

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var multiply(Var a, Var b);
Var scale(Var a, double s);
// a (n x c) plus a 1 x c row broadcast to every row.
Var add_row(Var a, Var bias);
Var relu(Var a);
Var sigmoid(Var a);
Var transpose(Var a);
Var softmax_rows(Var a);
// Column means: n x c -> 1 x c. An empty input yields a zero row.
Var mean_rows(Var a);
Var pick_row(Var a, std::size_t r);
Var sum(Var a);
Var concat_cols(Var a, Var b);
// (a + a^T) / 2 for square a.
Var symmetrize(Var a);

/// D^{-1/2} (A + I) D^{-1/2} with D the row sums of A + I. Differentiable in
/// every entry of A, so fractional (masked) adjacencies can be optimised.
Var gcn_normalize(Var adjacency);

enum class Elementwise { relu, sigmoid, multiply, add };
Var elementwise(Elementwise op, Var a);
Var elementwise(Elementwise op, Var a, Var b);

enum class Loss { softmax_cross_entropy, binary_cross_entropy, mse };

/// Scalar (1x1) losses, averaged over rows.
///  softmax_cross_entropy: pred are logits, target a row-stochastic matrix;
///      -mean_i sum_j t_ij log max(softmax(pred)_ij, eps).
///  binary_cross_entropy: pred are probabilities, clamped to [eps, 1-eps].
///  mse: mean over rows of the squared L2 distance between rows.
Var loss(Loss kind, Var pred, const Matrix& target);

// Mean of 1x1 scalars.
Var mean_of(std::span<const Var> scalars);

} // namespace acx::ad
