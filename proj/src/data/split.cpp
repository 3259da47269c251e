#include "acx/data/split.hpp"

#include <numeric>
#include <string>

#include "acx/core/error.hpp"
#include "acx/core/random.hpp"

namespace acx::data {

SplitIndex split(std::size_t count, std::uint64_t seed) {
    if (count < 10) throw DataError("split: need at least 10 instances, got " + std::to_string(count));
    std::vector<std::size_t> ids(count);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(ids);
    const std::size_t tenth = (count + 5) / 10;
    SplitIndex s;
    s.validation.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(tenth));
    s.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(tenth), ids.begin() + static_cast<std::ptrdiff_t>(2 * tenth));
    s.train.assign(ids.begin() + static_cast<std::ptrdiff_t>(2 * tenth), ids.end());
    return s;
}

} // namespace acx::data
