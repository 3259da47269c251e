#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "acx/graph/graph.hpp"

namespace acx {

/// Per-edge importance weights in [0, 1]. Stored as one entry per undirected
/// edge, so the dense form is symmetric by construction.
class WeightedMask {
public:
    WeightedMask() = default;
    /// Entries may come in any order; duplicates and weights outside [0, 1]
    /// throw MaskError.
    WeightedMask(std::size_t node_count, std::vector<std::pair<Edge, double>> entries);

    static WeightedMask constant(const Graph& g, double w);
    // Reads weights at the graph's edges from a dense n x n matrix, averaging (i,j) and (j,i).
    static WeightedMask from_dense(const Graph& g, const Matrix& weights);

    std::size_t node_count() const noexcept { return node_count_; }
    // Sorted by edge.
    const std::vector<std::pair<Edge, double>>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double weight(const Edge& e) const;
    Matrix to_dense() const;

    friend bool operator==(const WeightedMask&, const WeightedMask&) = default;

private:
    std::size_t node_count_ = 0;
    std::vector<std::pair<Edge, double>> entries_;
};

/// How many edges an explanation keeps: the top K, or the top ceil(R * |E|).
struct SubgraphSpec {
    enum class Mode { top_k, top_r };

    Mode mode = Mode::top_k;
    std::size_t k = 1;
    double r = 1.0;

    static SubgraphSpec top_k(std::size_t k);
    static SubgraphSpec top_r(double r);

    std::size_t demand(std::size_t edge_count) const;
    // "K=5" or "R=0.5"
    std::string label() const;
    static SubgraphSpec parse(const std::string& label);

    friend bool operator==(const SubgraphSpec&, const SubgraphSpec&) = default;
};

struct Selection {
    std::vector<Edge> edges;
    // The spec asked for more edges than the mask has.
    bool truncated = false;
};

struct Explanation {
    std::shared_ptr<const Graph> source;
    WeightedMask mask;
    std::vector<Edge> selected_edges;
    SubgraphSpec selector;
    int label_under_f = 0;
    std::string explainer;
    bool truncated = false;
};

/// A ⊙ M. Throws MaskError naming the first mask entry that is not an edge of g.
WeightedGraph apply_mask(const Graph& g, const WeightedMask& m);

/// Highest weights first; ties go to the lexicographically smaller edge.
Selection select_edges(const WeightedMask& m, const SubgraphSpec& spec);

/// Keeps exactly `edges`. Throws ValidityError on an edge g does not have.
Graph binarize(const Graph& g, const std::vector<Edge>& edges);

/// Removes `edges`. Throws ValidityError on an edge g does not have.
Graph occlude(const Graph& g, const std::vector<Edge>& edges);

struct KHopSubgraph {
    Graph graph;
    // original_ids[new_id] = id in the parent graph, ascending.
    std::vector<std::size_t> original_ids;
};

inline constexpr std::size_t kDefaultHops = 3;

/// Induced subgraph on the nodes within `hops` of `node`; target_node is set
/// to the image of `node`.
KHopSubgraph khop_subgraph(const Graph& g, std::size_t node, std::size_t hops = kDefaultHops);

/// Builds an explanation and checks selected_edges ⊆ edges(source).
Explanation make_explanation(std::shared_ptr<const Graph> source, WeightedMask mask, const SubgraphSpec& spec,
                             int label_under_f, std::string explainer);

// True when every selected edge belongs to the source graph.
bool is_valid(const Explanation& e);

} // namespace acx
