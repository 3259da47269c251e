#include "acx/gnn/layers.hpp"

#include "acx/core/error.hpp"

namespace acx::gnn {
namespace {

// Nonzero biases keep constant-feature inputs from collapsing to one direction.
constexpr double kBiasInit = 1.0;

} // namespace

std::vector<ad::Var> bind(ad::Tape& tape, std::span<const Matrix> params, bool trainable) {
    std::vector<ad::Var> vars;
    vars.reserve(params.size());
    for (const auto& p : params) vars.push_back(trainable ? tape.variable(p) : tape.constant(p));
    return vars;
}

ad::Var linear(ad::Var x, ad::Var w, ad::Var b) { return ad::add_row(ad::matmul(x, w), b); }

ad::Var convolve(ad::Var normalized_adjacency, ad::Var h, std::span<const ad::Var> layers, bool relu_last) {
    if (layers.size() % 2 != 0) throw UsageError("convolve: expected weight/bias pairs");
    const std::size_t count = layers.size() / 2;
    for (std::size_t l = 0; l < count; ++l) {
        h = linear(ad::matmul(normalized_adjacency, h), layers[2 * l], layers[2 * l + 1]);
        if (l + 1 < count || relu_last) h = ad::relu(h);
    }
    return h;
}

void init_layers(std::vector<Matrix>& params, std::span<const std::size_t> widths, Rng& rng) {
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        params.push_back(glorot(widths[l], widths[l + 1], rng));
        Matrix b(1, widths[l + 1]);
        for (double& x : b.data()) x = rng.uniform(-kBiasInit, kBiasInit);
        params.push_back(std::move(b));
    }
}

} // namespace acx::gnn
