#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace acx::data {

struct SplitIndex {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;

    friend bool operator==(const SplitIndex&, const SplitIndex&) = default;
};

/// Seeded shuffle of 0..count-1, then validation and test each get
/// round(count / 10) instances and train keeps the remainder.
/// Throws DataError below 10 instances.
SplitIndex split(std::size_t count, std::uint64_t seed);

} // namespace acx::data
