#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "acx/core/matrix.hpp"

namespace acx {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::int64_t step = 0;
};

/// One bias-corrected Adam update of params in place. State moments are
/// created on the first call; shapes of params, grads and state must agree.
void adam_step(std::span<Matrix> params, std::span<const Matrix> grads, AdamState& state,
               const AdamConfig& config = {});

} // namespace acx
