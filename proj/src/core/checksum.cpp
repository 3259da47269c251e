#include "acx/core/checksum.hpp"

#include <cstdio>

namespace acx {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t checksum(std::span<const Matrix> params) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& p : params) {
        const std::uint64_t shape[2] = {p.rows(), p.cols()};
        h = fnv1a({reinterpret_cast<const char*>(shape), sizeof shape}, h);
        h = fnv1a({reinterpret_cast<const char*>(p.data().data()), p.size() * sizeof(double)}, h);
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace acx
