#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "acx/graph/graph.hpp"

namespace acx::data {

struct TuDataset {
    std::string name;
    std::vector<Graph> graphs;
    // Raw graph label value for each class id (class id = index).
    std::vector<long long> label_values;
    // Raw node label value for each feature column.
    std::vector<long long> node_label_values;
    std::vector<std::string> warnings;
};

/// Reads the TU edge-list layout from `dir`:
///   <name>_A.txt                one "i, j" pair per line, 1-based global node ids
///   <name>_graph_indicator.txt  graph id (1-based) of every node
///   <name>_graph_labels.txt     one label per graph
///   <name>_node_labels.txt      optional, one label per node
/// Node features are one-hot over the sorted node-label vocabulary (a single
/// constant column when the file is absent). Graph labels are mapped to class
/// ids in sorted order. Edges listed in one direction only are symmetrised and
/// reported in `warnings`. Errors carry "file:line".
TuDataset load_tu_dataset(const std::filesystem::path& dir, const std::string& name);

// Name inferred from the single *_A.txt in dir.
TuDataset load_tu_dataset(const std::filesystem::path& dir);

/// Writes graphs in the same layout. Node labels are the argmax feature
/// column; both edge directions are written.
void save_tu_dataset(const std::filesystem::path& dir, const std::string& name, const std::vector<Graph>& graphs);

} // namespace acx::data
