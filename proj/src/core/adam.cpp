#include "acx/core/adam.hpp"

#include <cmath>

#include "acx/core/error.hpp"

namespace acx {

void adam_step(std::span<Matrix> params, std::span<const Matrix> grads, AdamState& state,
               const AdamConfig& config) {
    if (params.size() != grads.size()) throw DimensionError("adam: parameter and gradient counts differ");
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.rows(), p.cols());
            state.v.emplace_back(p.rows(), p.cols());
        }
    }
    if (state.m.size() != params.size()) throw DimensionError("adam: state does not match parameters");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        require_same_shape(params[i], grads[i], "adam gradient");
        require_same_shape(params[i], state.m[i], "adam state");
        auto p = params[i].data();
        auto g = grads[i].data();
        auto m = state.m[i].data();
        auto v = state.v[i].data();
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
            v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
            const double mhat = m[k] / c1;
            const double vhat = v[k] / c2;
            p[k] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
        }
    }
}

} // namespace acx
