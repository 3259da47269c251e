#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "acx/core/matrix.hpp"

namespace acx {

// FNV-1a 64 over raw bytes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

// Bitwise checksum of a parameter list (shapes and values).
std::uint64_t checksum(std::span<const Matrix> params);

std::string hex64(std::uint64_t v);

} // namespace acx
