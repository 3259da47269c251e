#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "acx/core/matrix.hpp"

namespace acx {

/// Seeded generator whose derived draws do not depend on the standard
/// library's distribution implementations, so runs reproduce across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform in [0, n). n must be positive.
    std::size_t index(std::size_t n);
    double normal();

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

// Glorot-uniform in x out weight matrix.
Matrix glorot(std::size_t in, std::size_t out, Rng& rng);

// Seed for a named sub-stream, so components seeded from one run seed do not share draws.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace acx
