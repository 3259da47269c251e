#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acx/core/matrix.hpp"

namespace acx::gnn {

/// Text weight format shared by the target model, generator and discriminator:
///
///   acx-gnn v1 <tag> <layers> <widths> <classes>
///   # <key> <value>            (zero or more metadata lines)
///   <row of matrix 0>          (space-separated, shortest round-trip decimals)
///   ...
///
/// <widths> is comma-separated: input width then one width per layer, so
/// <layers> equals the number of widths minus one. Matrix shapes are implied
/// by the tag and widths; the caller supplies them when parsing.
struct WeightFile {
    std::string tag;
    std::vector<std::size_t> widths;
    std::size_t classes = 0;
    std::map<std::string, std::string> meta;
    std::vector<Matrix> matrices;
};

using ShapeList = std::vector<std::pair<std::size_t, std::size_t>>;

std::string format_weight_file(const WeightFile& f);

/// Throws VersionError for a foreign magic/version and FormatError for any
/// truncation or malformed number.
WeightFile parse_weight_file(std::string_view text, const std::function<ShapeList(const WeightFile&)>& shapes);

void write_weight_file(const std::filesystem::path& path, const WeightFile& f);
WeightFile read_weight_file(const std::filesystem::path& path,
                            const std::function<ShapeList(const WeightFile&)>& shapes);

} // namespace acx::gnn
