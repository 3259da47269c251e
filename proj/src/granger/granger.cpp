#include "acx/granger/granger.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <omp.h>

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"

namespace acx::granger {
namespace {

double class_probability(const gnn::GnnModel& f, const WeightedGraph& g, int label) {
    const Matrix probs = gnn::forward(f, g);
    return gnn::prediction_row(f, probs, g.target_node)[static_cast<std::size_t>(label)];
}

double without_edge(const gnn::GnnModel& f, WeightedGraph& g, const Edge& e, int label) {
    g.adjacency(e.u, e.v) = 0.0;
    g.adjacency(e.v, e.u) = 0.0;
    const double p = class_probability(f, g, label);
    g.adjacency(e.u, e.v) = 1.0;
    g.adjacency(e.v, e.u) = 1.0;
    return p;
}

GroundTruth extract_one(const gnn::GnnModel& f, const data::Instance& inst) {
    const auto start = std::chrono::steady_clock::now();
    GroundTruth gt;
    gt.id = inst.id;
    gt.label = gnn::predict_label(f, *inst.graph).label;
    gt.edge_count = inst.graph->edge_count();
    gt.mask = inst.graph->edge_count() == 0 ? WeightedMask(inst.graph->node_count(), {})
                                            : weight_all_edges(f, *inst.graph);
    gt.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return gt;
}

} // namespace

EdgeEffect edge_effect(const gnn::GnnModel& f, const Graph& g, const Edge& e) {
    if (!g.has_edge(e.u, e.v)) throw ValidityError("granger: " + e.to_string() + " is not an edge of the graph");
    WeightedGraph w = WeightedGraph::of(g);
    const auto pred = gnn::predict_label(f, w);
    const Edge k = Edge::make(e.u, e.v);
    return {k, pred.probabilities[static_cast<std::size_t>(pred.label)] - without_edge(f, w, k, pred.label)};
}

std::vector<EdgeEffect> edge_effects(const gnn::GnnModel& f, const Graph& g) {
    WeightedGraph w = WeightedGraph::of(g);
    const auto pred = gnn::predict_label(f, w);
    const double base = pred.probabilities[static_cast<std::size_t>(pred.label)];
    std::vector<EdgeEffect> out;
    out.reserve(g.edge_count());
    for (const Edge& e : g.edges()) out.push_back({e, base - without_edge(f, w, e, pred.label)});
    return out;
}

WeightedMask normalize(std::size_t node_count, const std::vector<EdgeEffect>& effects) {
    if (effects.empty()) return WeightedMask(node_count, {});
    auto [lo, hi] = std::minmax_element(effects.begin(), effects.end(),
                                        [](const EdgeEffect& a, const EdgeEffect& b) { return a.delta < b.delta; });
    const double min = lo->delta;
    const double span = hi->delta - min;
    std::vector<std::pair<Edge, double>> entries;
    entries.reserve(effects.size());
    for (const auto& e : effects) {
        const double w = span > 0.0 ? std::clamp((e.delta - min) / span, 0.0, 1.0) : 0.5;
        entries.emplace_back(e.edge, w);
    }
    return WeightedMask(node_count, std::move(entries));
}

WeightedMask weight_all_edges(const gnn::GnnModel& f, const Graph& g) {
    return normalize(g.node_count(), edge_effects(f, g));
}

Explanation extract_ground_truth(const gnn::GnnModel& f, std::shared_ptr<const Graph> g, const SubgraphSpec& spec) {
    const int label = gnn::predict_label(f, *g).label;
    WeightedMask mask = weight_all_edges(f, *g);
    return make_explanation(std::move(g), std::move(mask), spec, label, "granger");
}

std::vector<GroundTruth> extract_all(const gnn::GnnModel& f, const std::vector<data::Instance>& instances,
                                     std::size_t jobs) {
    std::vector<GroundTruth> out(instances.size());
    std::vector<std::string> errors(instances.size());
    const long n = static_cast<long>(instances.size());
    const int threads = static_cast<int>(std::max<std::size_t>(1, jobs));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = extract_one(f, instances[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) throw NumericalError("extract-gt: instance " + instances[i].id + ": " + errors[i]);
    }
    return out;
}

std::vector<GroundTruth> extract_all_serial(const gnn::GnnModel& f, const std::vector<data::Instance>& instances) {
    std::vector<GroundTruth> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(extract_one(f, inst));
    return out;
}

std::string format_mask(const WeightedMask& m, const std::string& snapshot) {
    std::ostringstream out;
    if (!snapshot.empty()) out << "# snapshot " << snapshot << '\n';
    for (const auto& [e, w] : m.entries()) out << e.u << ' ' << e.v << ' ' << text::exact(w) << '\n';
    return out.str();
}

WeightedMask parse_mask(std::string_view content, std::size_t node_count, std::string* snapshot) {
    std::vector<std::pair<Edge, double>> entries;
    std::size_t line_no = 0;
    for (std::string_view line : text::split(content, '\n')) {
        ++line_no;
        line = text::trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto parts = text::split(line, ' ');
            if (parts.size() == 3 && parts[1] == "snapshot" && snapshot) *snapshot = std::string(parts[2]);
            continue;
        }
        auto parts = text::split(line, ' ');
        if (parts.size() != 3) throw FormatError("mask: line " + std::to_string(line_no) + ": expected 'i j weight'");
        auto i = text::parse_int(parts[0]);
        auto j = text::parse_int(parts[1]);
        auto w = text::parse_double(parts[2]);
        if (!i || !j || !w || *i < 0 || *j <= *i || static_cast<std::size_t>(*j) >= node_count) {
            throw FormatError("mask: line " + std::to_string(line_no) + ": bad entry '" + std::string(line) + "'");
        }
        entries.emplace_back(Edge{static_cast<std::size_t>(*i), static_cast<std::size_t>(*j)}, *w);
    }
    return WeightedMask(node_count, std::move(entries));
}

std::string format_manifest(const std::vector<GroundTruth>& gts) {
    std::ostringstream out;
    out << "instance,label,edges,wall_seconds\n";
    for (const auto& g : gts) out << g.id << ',' << g.label << ',' << g.edge_count << ',' << text::fixed(g.wall_seconds, 6) << '\n';
    return out.str();
}

void write_store(const std::filesystem::path& dir, const std::vector<GroundTruth>& gts, const std::string& snapshot) {
    std::filesystem::create_directories(dir);
    for (const auto& g : gts) text::write_file_atomic(dir / (g.id + ".mask"), format_mask(g.mask, snapshot));
    text::write_file_atomic(dir / "manifest.csv", format_manifest(gts));
    if (!snapshot.empty()) text::write_file_atomic(dir / "manifest.csv.meta", "snapshot " + snapshot + "\n");
}

std::vector<WeightedMask> read_store(const std::filesystem::path& dir, const std::vector<data::Instance>& instances,
                                     const std::string& snapshot) {
    std::vector<WeightedMask> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) {
        const auto path = dir / (inst.id + ".mask");
        if (!std::filesystem::exists(path)) throw DataError("ground truth missing for instance " + inst.id);
        std::string found;
        out.push_back(parse_mask(text::read_file(path), inst.graph->node_count(), &found));
        if (!snapshot.empty() && found != snapshot) {
            throw FormatError(path.string() + ": written under snapshot '" + found + "', run uses '" + snapshot + "'");
        }
    }
    return out;
}

} // namespace acx::granger
