#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "acx/core/matrix.hpp"
#include "acx/core/ops.hpp"
#include "acx/core/random.hpp"

namespace acx::gnn {

/// Puts params on the tape: as variables when `trainable`, else as constants
/// (gradients then stop at them and the stored weights are never touched).
std::vector<ad::Var> bind(ad::Tape& tape, std::span<const Matrix> params, bool trainable);

/// Graph convolution stack over a normalised adjacency:
///   H_{l+1} = relu(Â H_l W_l + b_l)
/// `layers` holds W_0, b_0, W_1, b_1, ... The last layer skips the ReLU when
/// relu_last is false.
ad::Var convolve(ad::Var normalized_adjacency, ad::Var h, std::span<const ad::Var> layers, bool relu_last);

/// Dense layer x W + b.
ad::Var linear(ad::Var x, ad::Var w, ad::Var b);

// Appends glorot W and a small uniform b for every consecutive width pair.
void init_layers(std::vector<Matrix>& params, std::span<const std::size_t> widths, Rng& rng);

} // namespace acx::gnn
