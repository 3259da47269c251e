#include "acx/data/synthetic.hpp"

#include <set>

#include "acx/core/error.hpp"
#include "acx/core/random.hpp"

namespace acx::data {
namespace {

struct Builder {
    std::size_t nodes = 0;
    std::set<Edge> edges;
    std::vector<int> labels;

    std::size_t add_node(int label) {
        labels.push_back(label);
        return nodes++;
    }
    bool add_edge(std::size_t a, std::size_t b) { return a != b && edges.insert(Edge::make(a, b)).second; }

    Graph build() const {
        return Graph::from_edges(nodes, {edges.begin(), edges.end()}, Matrix(nodes, kSyntheticFeatureWidth, 1.0),
                                 labels, std::nullopt);
    }
};

void add_random_edges(Builder& b, std::size_t count, Rng& rng) {
    const std::size_t n = b.nodes;
    const std::size_t max_edges = n * (n - 1) / 2;
    std::size_t added = 0;
    while (added < count && b.edges.size() < max_edges) {
        if (b.add_edge(rng.index(n), rng.index(n))) ++added;
    }
}

} // namespace

Scale parse_scale(const std::string& s) {
    if (s == "desk") return Scale::desk;
    if (s == "paper") return Scale::paper;
    throw UsageError("unknown scale '" + s + "' (expected desk or paper)");
}

std::string to_string(Scale s) { return s == Scale::desk ? "desk" : "paper"; }

BaShapesParams ba_shapes_preset(Scale s) {
    BaShapesParams p;
    if (s == Scale::desk) {
        p.base_nodes = 75;
        p.motif_count = 20;
    }
    return p;
}

TreeCyclesParams tree_cycles_preset(Scale s) {
    TreeCyclesParams p;
    if (s == Scale::desk) {
        p.tree_depth = 7;
        p.motif_count = 15;
    }
    return p;
}

SyntheticGraph generate_ba_shapes(const BaShapesParams& p, std::uint64_t seed) {
    if (p.base_nodes == 0 || p.attachment == 0 || p.random_edge_ratio < 0.0) {
        throw UsageError("ba_shapes: parameters must be positive");
    }
    if (p.base_nodes <= p.attachment) throw UsageError("ba_shapes: base_nodes must exceed the attachment count");
    Rng rng(seed);
    Builder b;
    for (std::size_t i = 0; i < p.base_nodes; ++i) b.add_node(0);

    // Preferential attachment: the first new node links to the m seed nodes,
    // later ones sample m distinct targets from the degree-weighted pool.
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < p.attachment; ++i) targets.push_back(i);
    std::vector<std::size_t> pool;
    for (std::size_t source = p.attachment; source < p.base_nodes; ++source) {
        for (std::size_t t : targets) b.add_edge(source, t);
        pool.insert(pool.end(), targets.begin(), targets.end());
        pool.insert(pool.end(), p.attachment, source);
        std::set<std::size_t> chosen;
        while (chosen.size() < p.attachment) chosen.insert(pool[rng.index(pool.size())]);
        targets.assign(chosen.begin(), chosen.end());
    }

    SyntheticGraph out;
    for (std::size_t m = 0; m < p.motif_count; ++m) {
        const std::size_t b0 = b.add_node(3), b1 = b.add_node(3);
        const std::size_t m0 = b.add_node(2), m1 = b.add_node(2);
        const std::size_t top = b.add_node(1);
        b.add_edge(b0, b1);
        b.add_edge(b1, m1);
        b.add_edge(m1, m0);
        b.add_edge(m0, b0);
        b.add_edge(m0, top);
        b.add_edge(m1, top);
        b.add_edge(b0, rng.index(p.base_nodes));
        out.motifs.push_back({b0, b1, m0, m1, top});
    }
    add_random_edges(b, static_cast<std::size_t>(p.random_edge_ratio * static_cast<double>(b.nodes)), rng);
    out.graph = b.build();
    return out;
}

SyntheticGraph generate_tree_cycles(const TreeCyclesParams& p, std::uint64_t seed) {
    if (p.tree_depth == 0) throw UsageError("tree_cycles: tree_depth must be positive");
    Rng rng(seed);
    Builder b;
    const std::size_t tree_nodes = (std::size_t{1} << p.tree_depth) - 1;
    for (std::size_t i = 0; i < tree_nodes; ++i) {
        b.add_node(0);
        if (i > 0) b.add_edge(i, (i - 1) / 2);
    }
    SyntheticGraph out;
    for (std::size_t m = 0; m < p.motif_count; ++m) {
        std::vector<std::size_t> ring;
        for (int i = 0; i < 6; ++i) ring.push_back(b.add_node(1));
        for (std::size_t i = 0; i < 6; ++i) b.add_edge(ring[i], ring[(i + 1) % 6]);
        b.add_edge(ring[0], rng.index(tree_nodes));
        out.motifs.push_back(std::move(ring));
    }
    out.graph = b.build();
    return out;
}

} // namespace acx::data
