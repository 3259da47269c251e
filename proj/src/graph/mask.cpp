#include "acx/graph/mask.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"

namespace acx {

WeightedMask::WeightedMask(std::size_t node_count, std::vector<std::pair<Edge, double>> entries)
    : node_count_(node_count), entries_(std::move(entries)) {
    for (auto& [e, w] : entries_) {
        e = Edge::make(e.u, e.v);
        if (e.u == e.v || e.v >= node_count_) throw MaskError("mask: invalid pair " + e.to_string());
        if (!(w >= 0.0 && w <= 1.0)) {
            throw MaskError("mask: weight " + text::exact(w) + " outside [0,1] at " + e.to_string());
        }
    }
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].first == entries_[i - 1].first) {
            throw MaskError("mask: duplicate entry " + entries_[i].first.to_string());
        }
    }
}

WeightedMask WeightedMask::constant(const Graph& g, double w) {
    std::vector<std::pair<Edge, double>> entries;
    entries.reserve(g.edge_count());
    for (const Edge& e : g.edges()) entries.emplace_back(e, w);
    return WeightedMask(g.node_count(), std::move(entries));
}

WeightedMask WeightedMask::from_dense(const Graph& g, const Matrix& weights) {
    if (weights.rows() != g.node_count() || weights.cols() != g.node_count()) {
        throw DimensionError("mask: dense weights " + weights.shape_string() + " for " +
                             std::to_string(g.node_count()) + " nodes");
    }
    std::vector<std::pair<Edge, double>> entries;
    entries.reserve(g.edge_count());
    for (const Edge& e : g.edges()) entries.emplace_back(e, 0.5 * (weights(e.u, e.v) + weights(e.v, e.u)));
    return WeightedMask(g.node_count(), std::move(entries));
}

double WeightedMask::weight(const Edge& e) const {
    const Edge key = Edge::make(e.u, e.v);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const auto& entry, const Edge& k) { return entry.first < k; });
    return it != entries_.end() && it->first == key ? it->second : 0.0;
}

Matrix WeightedMask::to_dense() const {
    Matrix m(node_count_, node_count_);
    for (const auto& [e, w] : entries_) {
        m(e.u, e.v) = w;
        m(e.v, e.u) = w;
    }
    return m;
}

SubgraphSpec SubgraphSpec::top_k(std::size_t k) {
    if (k < 1) throw UsageError("subgraph spec: K must be at least 1");
    return {Mode::top_k, k, 1.0};
}

SubgraphSpec SubgraphSpec::top_r(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw UsageError("subgraph spec: R must lie in (0,1], got " + text::exact(r));
    return {Mode::top_r, 1, r};
}

std::size_t SubgraphSpec::demand(std::size_t edge_count) const {
    if (mode == Mode::top_k) return k;
    // 1e-9 keeps products such as 0.7 * 10 = 7.000000000000001 from rounding up.
    return static_cast<std::size_t>(std::ceil(r * static_cast<double>(edge_count) - 1e-9));
}

std::string SubgraphSpec::label() const {
    if (mode == Mode::top_k) return "K=" + std::to_string(k);
    return "R=" + text::exact(r);
}

SubgraphSpec SubgraphSpec::parse(const std::string& label) {
    const auto t = text::trim(label);
    if (t.size() > 2 && (t[0] == 'K' || t[0] == 'k') && t[1] == '=') {
        const auto v = text::parse_int(t.substr(2));
        if (v && *v >= 1) return top_k(static_cast<std::size_t>(*v));
    } else if (t.size() > 2 && (t[0] == 'R' || t[0] == 'r') && t[1] == '=') {
        const auto v = text::parse_double(t.substr(2));
        if (v) return top_r(*v);
    }
    throw UsageError("subgraph spec: cannot parse '" + label + "' (expected K=<int> or R=<ratio>)");
}

WeightedGraph apply_mask(const Graph& g, const WeightedMask& m) {
    if (m.node_count() != g.node_count()) {
        throw MaskError("mask: built for " + std::to_string(m.node_count()) + " nodes, graph has " +
                        std::to_string(g.node_count()));
    }
    Matrix a(g.node_count(), g.node_count());
    for (const auto& [e, w] : m.entries()) {
        if (!g.has_edge(e.u, e.v)) {
            if (w == 0.0) continue;
            throw MaskError("mask: weight on non-edge " + e.to_string());
        }
        a(e.u, e.v) = w;
        a(e.v, e.u) = w;
    }
    return {std::move(a), g.features(), g.target_node()};
}

Selection select_edges(const WeightedMask& m, const SubgraphSpec& spec) {
    std::vector<std::pair<Edge, double>> ranked = m.entries();
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const std::size_t want = spec.demand(ranked.size());
    Selection out;
    out.truncated = want > ranked.size();
    const std::size_t take = std::min(want, ranked.size());
    out.edges.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.edges.push_back(ranked[i].first);
    return out;
}

namespace {

Matrix checked_subset(const Graph& g, const std::vector<Edge>& edges, const char* what) {
    Matrix keep(g.node_count(), g.node_count());
    for (const Edge& raw : edges) {
        const Edge e = Edge::make(raw.u, raw.v);
        if (!g.has_edge(e.u, e.v)) throw ValidityError(std::string(what) + ": " + e.to_string() + " is not an edge");
        keep(e.u, e.v) = 1.0;
        keep(e.v, e.u) = 1.0;
    }
    return keep;
}

} // namespace

Graph binarize(const Graph& g, const std::vector<Edge>& edges) {
    Matrix keep = checked_subset(g, edges, "binarize");
    return Graph(std::move(keep), g.features(), g.node_labels(), g.graph_label(), g.target_node());
}

Graph occlude(const Graph& g, const std::vector<Edge>& edges) {
    Matrix drop = checked_subset(g, edges, "occlude");
    Matrix a = g.adjacency();
    auto ad = a.data();
    auto dd = drop.data();
    for (std::size_t i = 0; i < ad.size(); ++i)
        if (dd[i] != 0.0) ad[i] = 0.0;
    return Graph(std::move(a), g.features(), g.node_labels(), g.graph_label(), g.target_node());
}

KHopSubgraph khop_subgraph(const Graph& g, std::size_t node, std::size_t hops) {
    const std::size_t n = g.node_count();
    if (node >= n) throw UsageError("khop_subgraph: node " + std::to_string(node) + " out of range");
    std::vector<std::size_t> depth(n, SIZE_MAX);
    std::deque<std::size_t> queue{node};
    depth[node] = 0;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        if (depth[u] == hops) continue;
        for (std::size_t v = 0; v < n; ++v) {
            if (g.adjacency()(u, v) != 0.0 && depth[v] == SIZE_MAX) {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    KHopSubgraph out;
    std::vector<std::size_t> remap(n, SIZE_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        if (depth[v] != SIZE_MAX) {
            remap[v] = out.original_ids.size();
            out.original_ids.push_back(v);
        }
    }
    const std::size_t m = out.original_ids.size();
    Matrix a(m, m);
    Matrix x(m, g.features().cols());
    std::optional<std::vector<int>> labels;
    if (g.node_labels()) labels.emplace(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t oi = out.original_ids[i];
        for (std::size_t j = 0; j < m; ++j) a(i, j) = g.adjacency()(oi, out.original_ids[j]);
        for (std::size_t c = 0; c < x.cols(); ++c) x(i, c) = g.features()(oi, c);
        if (labels) (*labels)[i] = (*g.node_labels())[oi];
    }
    out.graph = Graph(std::move(a), std::move(x), std::move(labels), g.graph_label(), remap[node]);
    return out;
}

Explanation make_explanation(std::shared_ptr<const Graph> source, WeightedMask mask, const SubgraphSpec& spec,
                             int label_under_f, std::string explainer) {
    if (!source) throw UsageError("explanation: missing source graph");
    Selection sel = select_edges(mask, spec);
    Explanation e{std::move(source), std::move(mask), std::move(sel.edges), spec, label_under_f,
                  std::move(explainer), sel.truncated};
    for (const Edge& edge : e.selected_edges) {
        if (!e.source->has_edge(edge.u, edge.v)) {
            throw ValidityError("explanation: selected " + edge.to_string() + " is not an edge of the source");
        }
    }
    return e;
}

bool is_valid(const Explanation& e) {
    if (!e.source) return false;
    for (const Edge& edge : e.selected_edges)
        if (!e.source->has_edge(edge.u, edge.v)) return false;
    return true;
}

} // namespace acx
