#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "acx/core/matrix.hpp"

namespace acx {

/// Undirected edge, stored with u < v.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;

    static Edge make(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }
    auto operator<=>(const Edge&) const = default;
    std::string to_string() const;
};

enum class TaskKind { node, graph };

/// Graph G = (V, A, X): symmetric 0/1 adjacency with zero diagonal, one
/// feature row per node, and either per-node labels or a graph label.
/// Immutable once built; construction validates every invariant.
class Graph {
public:
    Graph() = default;

    /// Throws DataError when the adjacency is not square, symmetric, binary and
    /// loop-free, when feature rows do not match, or labels are inconsistent.
    Graph(Matrix adjacency, Matrix features, std::optional<std::vector<int>> node_labels,
          std::optional<int> graph_label, std::optional<std::size_t> target_node = std::nullopt);

    static Graph from_edges(std::size_t node_count, const std::vector<Edge>& edges, Matrix features,
                            std::optional<std::vector<int>> node_labels, std::optional<int> graph_label,
                            std::optional<std::size_t> target_node = std::nullopt);

    std::size_t node_count() const noexcept { return adjacency_.rows(); }
    const Matrix& adjacency() const noexcept { return adjacency_; }
    const Matrix& features() const noexcept { return features_; }
    const std::optional<std::vector<int>>& node_labels() const noexcept { return node_labels_; }
    const std::optional<int>& graph_label() const noexcept { return graph_label_; }
    const std::optional<std::size_t>& target_node() const noexcept { return target_node_; }
    TaskKind task() const noexcept { return graph_label_ ? TaskKind::graph : TaskKind::node; }

    // Edges in ascending (u, v) order.
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool has_edge(std::size_t a, std::size_t b) const;

    Graph with_target(std::size_t node) const;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.adjacency_ == b.adjacency_ && a.features_ == b.features_ && a.node_labels_ == b.node_labels_ &&
               a.graph_label_ == b.graph_label_ && a.target_node_ == b.target_node_;
    }

private:
    Matrix adjacency_;
    Matrix features_;
    std::optional<std::vector<int>> node_labels_;
    std::optional<int> graph_label_;
    std::optional<std::size_t> target_node_;
    std::vector<Edge> edges_;
};

/// A graph whose adjacency may carry fractional weights, e.g. A ⊙ M.
struct WeightedGraph {
    Matrix adjacency;
    Matrix features;
    std::optional<std::size_t> target_node;

    static WeightedGraph of(const Graph& g) { return {g.adjacency(), g.features(), g.target_node()}; }
};

} // namespace acx
