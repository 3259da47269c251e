#include "acx/data/workload.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "acx/core/error.hpp"
#include "acx/core/random.hpp"
#include "acx/core/text.hpp"
#include "acx/graph/mask.hpp"

namespace acx::data {
namespace {

using nlohmann::json;

std::string padded(const char* prefix, std::size_t id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%05zu", prefix, id);
    return buf;
}

json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
    json j{{"nodes", g.node_count()},
           {"edges", edges},
           {"feature_width", g.features().cols()},
           {"features", g.features().values()}};
    if (g.node_labels()) j["node_labels"] = *g.node_labels();
    if (g.graph_label()) j["graph_label"] = *g.graph_label();
    if (g.target_node()) j["target_node"] = *g.target_node();
    return j;
}

Graph graph_from_json(const json& j) {
    const std::size_t n = j.at("nodes").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back(Edge::make(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()));
    Matrix x(n, j.at("feature_width").get<std::size_t>(), j.at("features").get<std::vector<double>>());
    std::optional<std::vector<int>> node_labels;
    std::optional<int> graph_label;
    std::optional<std::size_t> target;
    if (j.contains("node_labels")) node_labels = j["node_labels"].get<std::vector<int>>();
    if (j.contains("graph_label")) graph_label = j["graph_label"].get<int>();
    if (j.contains("target_node")) target = j["target_node"].get<std::size_t>();
    return Graph::from_edges(n, edges, std::move(x), std::move(node_labels), graph_label, target);
}

json split_to_json(const SplitIndex& s) {
    return {{"train", s.train}, {"validation", s.validation}, {"test", s.test}};
}

SplitIndex split_from_json(const json& j) {
    return {j.at("train").get<std::vector<std::size_t>>(), j.at("validation").get<std::vector<std::size_t>>(),
            j.at("test").get<std::vector<std::size_t>>()};
}

} // namespace

std::vector<const Instance*> Workload::instances_in(const std::vector<std::size_t>& ids) const {
    std::vector<const Instance*> out;
    out.reserve(ids.size());
    for (std::size_t i : ids) out.push_back(&instances.at(i));
    return out;
}

Workload make_node_workload(std::string name, const SyntheticGraph& synthetic, std::size_t hops, std::uint64_t seed) {
    Workload w;
    w.name = std::move(name);
    w.task = TaskKind::node;
    const Graph& g = synthetic.graph;
    const auto& labels = *g.node_labels();
    w.classes = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
    w.feature_width = g.features().cols();
    w.model_split = split(g.node_count(), derive_seed(seed, 1));

    std::vector<std::size_t> motif_nodes;
    for (const auto& motif : synthetic.motifs) motif_nodes.insert(motif_nodes.end(), motif.begin(), motif.end());
    std::sort(motif_nodes.begin(), motif_nodes.end());
    for (std::size_t v : motif_nodes) {
        KHopSubgraph sub = khop_subgraph(g, v, hops);
        w.instances.push_back({padded("node_", v), std::make_shared<const Graph>(std::move(sub.graph)), labels[v]});
    }
    w.instance_split = split(w.instances.size(), derive_seed(seed, 2));
    w.graphs.push_back(g);
    return w;
}

Workload make_graph_workload(std::string name, std::vector<Graph> graphs, std::uint64_t seed) {
    Workload w;
    w.name = std::move(name);
    w.task = TaskKind::graph;
    if (graphs.empty()) throw DataError("workload: no graphs");
    int max_label = 0;
    for (const auto& g : graphs) max_label = std::max(max_label, *g.graph_label());
    w.classes = static_cast<std::size_t>(max_label) + 1;
    w.feature_width = graphs.front().features().cols();
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        w.instances.push_back({padded("graph_", i), std::make_shared<const Graph>(graphs[i]), *graphs[i].graph_label()});
    }
    w.instance_split = split(graphs.size(), derive_seed(seed, 2));
    w.model_split = w.instance_split;
    w.graphs = std::move(graphs);
    return w;
}

void save_workload(const std::filesystem::path& path, const Workload& w, const std::string& snapshot) {
    json j;
    j["format"] = "acx-data v1";
    j["snapshot"] = snapshot;
    j["name"] = w.name;
    j["task"] = w.task == TaskKind::node ? "node" : "graph";
    j["classes"] = w.classes;
    j["feature_width"] = w.feature_width;
    j["graphs"] = json::array();
    for (const auto& g : w.graphs) j["graphs"].push_back(graph_to_json(g));
    j["model_split"] = split_to_json(w.model_split);
    j["instance_split"] = split_to_json(w.instance_split);
    j["instances"] = json::array();
    for (const auto& inst : w.instances) {
        j["instances"].push_back({{"id", inst.id}, {"label", inst.label}, {"graph", graph_to_json(*inst.graph)}});
    }
    text::write_file_atomic(path, j.dump());
}

Workload load_workload(const std::filesystem::path& path, std::string* snapshot) {
    json j;
    try {
        j = json::parse(text::read_file(path));
        if (j.at("format").get<std::string>() != "acx-data v1") throw VersionError("workload: unsupported format in " + path.string());
        Workload w;
        w.name = j.at("name").get<std::string>();
        w.task = j.at("task").get<std::string>() == "node" ? TaskKind::node : TaskKind::graph;
        w.classes = j.at("classes").get<std::size_t>();
        w.feature_width = j.at("feature_width").get<std::size_t>();
        for (const auto& g : j.at("graphs")) w.graphs.push_back(graph_from_json(g));
        w.model_split = split_from_json(j.at("model_split"));
        w.instance_split = split_from_json(j.at("instance_split"));
        for (const auto& inst : j.at("instances")) {
            w.instances.push_back({inst.at("id").get<std::string>(),
                                   std::make_shared<const Graph>(graph_from_json(inst.at("graph"))),
                                   inst.at("label").get<int>()});
        }
        if (snapshot) *snapshot = j.at("snapshot").get<std::string>();
        return w;
    } catch (const json::exception& e) {
        throw FormatError("workload: " + path.string() + ": " + e.what());
    }
}

} // namespace acx::data
