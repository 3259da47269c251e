#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acx/graph/graph.hpp"

namespace acx::data {

inline constexpr std::size_t kSyntheticFeatureWidth = 10;

enum class Scale { desk, paper };
Scale parse_scale(const std::string& s);
std::string to_string(Scale s);

struct BaShapesParams {
    std::size_t base_nodes = 300;
    std::size_t motif_count = 80;
    double random_edge_ratio = 0.1;
    std::size_t attachment = 5; // BA edges per new node
};

struct TreeCyclesParams {
    std::size_t tree_depth = 9; // levels; 2^depth - 1 tree nodes
    std::size_t motif_count = 60;
};

// Paper-scale parameters reproduce the node and label counts of the original
// benchmarks. The desk preset quarters the motif count and shrinks the base
// graph so that the class proportions stay the same.
BaShapesParams ba_shapes_preset(Scale s);
TreeCyclesParams tree_cycles_preset(Scale s);

/// A generated benchmark graph plus the node ids of every planted motif.
struct SyntheticGraph {
    Graph graph;
    std::vector<std::vector<std::size_t>> motifs;
};

// Node labels: 0 base, 1 house top (roof), 2 house middle, 3 house bottom.
SyntheticGraph generate_ba_shapes(const BaShapesParams& p, std::uint64_t seed);

// Node labels: 0 tree, 1 cycle.
SyntheticGraph generate_tree_cycles(const TreeCyclesParams& p, std::uint64_t seed);

} // namespace acx::data
