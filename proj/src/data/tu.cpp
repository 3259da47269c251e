#include "acx/data/tu.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"

namespace acx::data {
namespace fs = std::filesystem;
namespace {

struct Line {
    std::size_t number;
    std::string text;
};

std::vector<Line> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("tu: cannot open " + path.string());
    std::vector<Line> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        out.push_back({n, line});
    }
    return out;
}

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& what) {
    throw ParseError(path.filename().string() + ":" + std::to_string(line) + ": " + what);
}

long long int_at(const fs::path& path, const Line& l, std::string_view field) {
    const auto v = text::parse_int(field);
    if (!v) fail(path, l.number, "expected an integer, got '" + std::string(text::trim(field)) + "'");
    return *v;
}

} // namespace

TuDataset load_tu_dataset(const fs::path& dir, const std::string& name) {
    const fs::path a_path = dir / (name + "_A.txt");
    const fs::path ind_path = dir / (name + "_graph_indicator.txt");
    const fs::path gl_path = dir / (name + "_graph_labels.txt");
    const fs::path nl_path = dir / (name + "_node_labels.txt");

    TuDataset ds;
    ds.name = name;

    // graph indicator: node i (1-based) -> graph id, ids must be 1..G and non-decreasing.
    const auto ind_lines = read_lines(ind_path);
    std::vector<std::size_t> graph_of(ind_lines.size());
    long long prev = 0;
    for (std::size_t i = 0; i < ind_lines.size(); ++i) {
        const long long g = int_at(ind_path, ind_lines[i], ind_lines[i].text);
        if (g < 1 || g < prev || g > prev + 1) {
            fail(ind_path, ind_lines[i].number, "graph ids must start at 1 and increase by at most 1 per node");
        }
        prev = g;
        graph_of[i] = static_cast<std::size_t>(g - 1);
    }
    const std::size_t graph_count = static_cast<std::size_t>(prev);
    const std::size_t node_total = graph_of.size();

    std::vector<std::size_t> first_node(graph_count + 1, node_total);
    for (std::size_t i = node_total; i-- > 0;) first_node[graph_of[i]] = i;
    first_node[graph_count] = node_total;

    const auto gl_lines = read_lines(gl_path);
    if (gl_lines.size() != graph_count) {
        fail(gl_path, gl_lines.empty() ? 1 : gl_lines.back().number,
             std::to_string(gl_lines.size()) + " graph labels for " + std::to_string(graph_count) + " graphs");
    }
    std::vector<long long> raw_graph_labels;
    for (const auto& l : gl_lines) raw_graph_labels.push_back(int_at(gl_path, l, l.text));
    ds.label_values = raw_graph_labels;
    std::sort(ds.label_values.begin(), ds.label_values.end());
    ds.label_values.erase(std::unique(ds.label_values.begin(), ds.label_values.end()), ds.label_values.end());

    std::vector<long long> raw_node_labels;
    if (fs::exists(nl_path)) {
        const auto nl_lines = read_lines(nl_path);
        if (nl_lines.size() != node_total) {
            fail(nl_path, nl_lines.empty() ? 1 : nl_lines.back().number,
                 std::to_string(nl_lines.size()) + " node labels for " + std::to_string(node_total) + " nodes");
        }
        for (const auto& l : nl_lines) raw_node_labels.push_back(int_at(nl_path, l, text::split(l.text, ',')[0]));
        ds.node_label_values = raw_node_labels;
        std::sort(ds.node_label_values.begin(), ds.node_label_values.end());
        ds.node_label_values.erase(std::unique(ds.node_label_values.begin(), ds.node_label_values.end()),
                                   ds.node_label_values.end());
    }

    // Directed pairs per graph, local ids.
    std::vector<std::set<std::pair<std::size_t, std::size_t>>> arcs(graph_count);
    for (const auto& l : read_lines(a_path)) {
        const auto fields = text::split(l.text, ',');
        if (fields.size() != 2) fail(a_path, l.number, "expected 'i, j'");
        const long long i = int_at(a_path, l, fields[0]);
        const long long j = int_at(a_path, l, fields[1]);
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > node_total || static_cast<std::size_t>(j) > node_total) {
            fail(a_path, l.number, "node id out of range 1.." + std::to_string(node_total));
        }
        const std::size_t gi = graph_of[static_cast<std::size_t>(i - 1)];
        if (gi != graph_of[static_cast<std::size_t>(j - 1)]) fail(a_path, l.number, "edge joins two different graphs");
        if (i == j) fail(a_path, l.number, "self loop");
        arcs[gi].insert({static_cast<std::size_t>(i - 1) - first_node[gi], static_cast<std::size_t>(j - 1) - first_node[gi]});
    }

    const std::size_t width = ds.node_label_values.empty() ? 1 : ds.node_label_values.size();
    std::size_t one_way = 0;
    for (std::size_t g = 0; g < graph_count; ++g) {
        const std::size_t n = first_node[g + 1] - first_node[g];
        std::vector<Edge> edges;
        for (const auto& [u, v] : arcs[g]) {
            if (!arcs[g].contains({v, u})) ++one_way;
            if (u < v || !arcs[g].contains({v, u})) edges.push_back(Edge::make(u, v));
        }
        Matrix x(n, width, ds.node_label_values.empty() ? 1.0 : 0.0);
        if (!ds.node_label_values.empty()) {
            for (std::size_t v = 0; v < n; ++v) {
                const long long raw = raw_node_labels[first_node[g] + v];
                const auto col = std::lower_bound(ds.node_label_values.begin(), ds.node_label_values.end(), raw) -
                                 ds.node_label_values.begin();
                x(v, static_cast<std::size_t>(col)) = 1.0;
            }
        }
        const auto cls = std::lower_bound(ds.label_values.begin(), ds.label_values.end(), raw_graph_labels[g]) -
                         ds.label_values.begin();
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        ds.graphs.push_back(Graph::from_edges(n, edges, std::move(x), std::nullopt, static_cast<int>(cls)));
    }
    if (one_way > 0) {
        ds.warnings.push_back(a_path.filename().string() + ": " + std::to_string(one_way) +
                              " edges listed in one direction only; symmetrised");
    }
    return ds;
}

TuDataset load_tu_dataset(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string f = entry.path().filename().string();
        if (f.size() > 6 && f.ends_with("_A.txt")) names.push_back(f.substr(0, f.size() - 6));
    }
    if (names.size() != 1) {
        throw DataError("tu: expected exactly one *_A.txt in " + dir.string() + ", found " + std::to_string(names.size()));
    }
    return load_tu_dataset(dir, names.front());
}

void save_tu_dataset(const fs::path& dir, const std::string& name, const std::vector<Graph>& graphs) {
    std::ostringstream a, ind, gl, nl;
    std::size_t offset = 0;
    for (std::size_t g = 0; g < graphs.size(); ++g) {
        const Graph& graph = graphs[g];
        if (!graph.graph_label()) throw UsageError("tu: graph " + std::to_string(g) + " has no graph label");
        for (std::size_t v = 0; v < graph.node_count(); ++v) {
            ind << g + 1 << '\n';
            const auto row = graph.features().row(v);
            nl << std::distance(row.begin(), std::max_element(row.begin(), row.end())) << '\n';
        }
        for (const Edge& e : graph.edges()) {
            a << offset + e.u + 1 << ", " << offset + e.v + 1 << '\n';
            a << offset + e.v + 1 << ", " << offset + e.u + 1 << '\n';
        }
        gl << *graph.graph_label() << '\n';
        offset += graph.node_count();
    }
    fs::create_directories(dir);
    text::write_file_atomic(dir / (name + "_A.txt"), a.str());
    text::write_file_atomic(dir / (name + "_graph_indicator.txt"), ind.str());
    text::write_file_atomic(dir / (name + "_graph_labels.txt"), gl.str());
    text::write_file_atomic(dir / (name + "_node_labels.txt"), nl.str());
}

} // namespace acx::data
