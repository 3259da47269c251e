#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "acx/data/workload.hpp"
#include "acx/gnn/model.hpp"
#include "acx/graph/mask.hpp"

namespace acx::granger {

/// Drop in f's probability for its predicted class when one edge is removed.
struct EdgeEffect {
    Edge edge;
    double delta = 0.0;
};

/// delta = p(l̂ | g) - p(l̂ | g without e), l̂ predicted on g.
/// Throws ValidityError when e is not an edge of g.
EdgeEffect edge_effect(const gnn::GnnModel& f, const Graph& g, const Edge& e);

// One effect per edge of g, in g.edges() order.
std::vector<EdgeEffect> edge_effects(const gnn::GnnModel& f, const Graph& g);

/// Min-max normalised deltas; when every delta is equal all weights are 0.5.
/// Order is preserved, so negative effects rank below zero effects.
WeightedMask normalize(std::size_t node_count, const std::vector<EdgeEffect>& effects);

WeightedMask weight_all_edges(const gnn::GnnModel& f, const Graph& g);

Explanation extract_ground_truth(const gnn::GnnModel& f, std::shared_ptr<const Graph> g, const SubgraphSpec& spec);

/// Ground-truth record for one instance.
struct GroundTruth {
    std::string id;
    int label = 0; // predicted by f
    std::size_t edge_count = 0;
    double wall_seconds = 0.0;
    WeightedMask mask;
};

/// Extracts every instance with `jobs` threads. Results are in instance order
/// and identical to extract_all_serial except for wall_seconds.
std::vector<GroundTruth> extract_all(const gnn::GnnModel& f, const std::vector<data::Instance>& instances,
                                     std::size_t jobs);
std::vector<GroundTruth> extract_all_serial(const gnn::GnnModel& f, const std::vector<data::Instance>& instances);

/// Mask file: optional "# snapshot <hash>" line, then "i j weight" per edge, i < j.
std::string format_mask(const WeightedMask& m, const std::string& snapshot);
WeightedMask parse_mask(std::string_view text, std::size_t node_count, std::string* snapshot = nullptr);

// Manifest CSV: instance,label,edges,wall_seconds
std::string format_manifest(const std::vector<GroundTruth>& gts);

/// Writes <dir>/<id>.mask for every record and <dir>/manifest.csv.
void write_store(const std::filesystem::path& dir, const std::vector<GroundTruth>& gts, const std::string& snapshot);

/// Reads the masks for `instances` back. Throws DataError naming the first
/// missing instance and FormatError when a file carries another snapshot.
std::vector<WeightedMask> read_store(const std::filesystem::path& dir, const std::vector<data::Instance>& instances,
                                     const std::string& snapshot);

} // namespace acx::granger
