#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "acx/data/split.hpp"
#include "acx/data/synthetic.hpp"
#include "acx/graph/graph.hpp"

namespace acx::data {

/// One unit of explanation: a graph (for node tasks, the k-hop neighbourhood
/// of a motif node with target_node set) and its dataset label.
struct Instance {
    std::string id;
    std::shared_ptr<const Graph> graph;
    int label = 0;
};

/// Everything the pipeline needs about a dataset.
///
/// Node tasks: `graphs` holds the single benchmark graph, `model_split` is
/// over its nodes, and instances are the motif nodes. Graph tasks: `graphs`
/// are the dataset graphs and both splits are over them.
struct Workload {
    std::string name;
    TaskKind task = TaskKind::node;
    std::size_t classes = 0;
    std::size_t feature_width = 0;
    std::vector<Graph> graphs;
    SplitIndex model_split;
    std::vector<Instance> instances;
    SplitIndex instance_split;

    std::vector<const Instance*> instances_in(const std::vector<std::size_t>& ids) const;
};

Workload make_node_workload(std::string name, const SyntheticGraph& synthetic, std::size_t hops, std::uint64_t seed);
Workload make_graph_workload(std::string name, std::vector<Graph> graphs, std::uint64_t seed);

/// JSON round trip. The snapshot string is stored alongside and returned by
/// load_workload through `snapshot`.
void save_workload(const std::filesystem::path& path, const Workload& w, const std::string& snapshot);
Workload load_workload(const std::filesystem::path& path, std::string* snapshot = nullptr);

} // namespace acx::data
