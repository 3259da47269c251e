#include "acx/graph/graph.hpp"

#include "acx/core/error.hpp"

namespace acx {

std::string Edge::to_string() const { return "(" + std::to_string(u) + "," + std::to_string(v) + ")"; }

Graph::Graph(Matrix adjacency, Matrix features, std::optional<std::vector<int>> node_labels,
             std::optional<int> graph_label, std::optional<std::size_t> target_node)
    : adjacency_(std::move(adjacency)),
      features_(std::move(features)),
      node_labels_(std::move(node_labels)),
      graph_label_(graph_label),
      target_node_(target_node) {
    const std::size_t n = adjacency_.rows();
    if (adjacency_.cols() != n) throw DataError("graph: adjacency not square, " + adjacency_.shape_string());
    if (features_.rows() != n) {
        throw DataError("graph: " + std::to_string(features_.rows()) + " feature rows for " + std::to_string(n) +
                        " nodes");
    }
    if (node_labels_.has_value() == graph_label_.has_value()) {
        throw DataError("graph: exactly one of node labels / graph label must be present");
    }
    if (node_labels_ && node_labels_->size() != n) throw DataError("graph: node label count differs from node count");
    if (target_node_ && *target_node_ >= n) throw DataError("graph: target node out of range");
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0) throw DataError("graph: self loop at node " + std::to_string(i));
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = adjacency_(i, j);
            if (a != adjacency_(j, i)) throw DataError("graph: adjacency not symmetric at " + Edge{i, j}.to_string());
            if (a != 0.0 && a != 1.0) throw DataError("graph: non-binary adjacency entry at " + Edge{i, j}.to_string());
            if (a == 1.0) edges_.push_back({i, j});
        }
    }
}

Graph Graph::from_edges(std::size_t node_count, const std::vector<Edge>& edges, Matrix features,
                        std::optional<std::vector<int>> node_labels, std::optional<int> graph_label,
                        std::optional<std::size_t> target_node) {
    Matrix a(node_count, node_count);
    for (const Edge& e : edges) {
        if (e.u >= node_count || e.v >= node_count) throw DataError("graph: edge " + e.to_string() + " out of range");
        if (e.u == e.v) throw DataError("graph: self loop " + e.to_string());
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    return Graph(std::move(a), std::move(features), std::move(node_labels), graph_label, target_node);
}

bool Graph::has_edge(std::size_t a, std::size_t b) const {
    const std::size_t n = node_count();
    return a < n && b < n && a != b && adjacency_(a, b) == 1.0;
}

Graph Graph::with_target(std::size_t node) const {
    if (node >= node_count()) throw DataError("graph: target node out of range");
    Graph g = *this;
    g.target_node_ = node;
    return g;
}

} // namespace acx
