#include "acx/graph/export.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "acx/core/text.hpp"

namespace acx::viz {
namespace {

struct EdgeStyle {
    const WeightedMask* mask = nullptr;
    std::set<Edge> important;
};

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string dot(const Graph& g, const std::string& name, const EdgeStyle* style) {
    std::ostringstream out;
    out << "graph \"" << name << "\" {\n";
    if (g.graph_label()) out << "  label=\"class " << *g.graph_label() << "\";\n";
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        out << "  n" << v << " [";
        if (g.node_labels()) out << "label=\"" << v << ":" << (*g.node_labels())[v] << "\", class=" << (*g.node_labels())[v];
        else out << "label=\"" << v << "\"";
        if (g.target_node() && *g.target_node() == v) out << ", target=true, shape=doublecircle";
        out << "];\n";
    }
    for (const Edge& e : g.edges()) {
        out << "  n" << e.u << " -- n" << e.v;
        if (style) {
            const bool imp = style->important.contains(e);
            out << " [weight=" << text::exact(style->mask->weight(e)) << ", important=" << (imp ? "true" : "false");
            if (imp) out << ", style=bold, color=red";
            out << "]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string graphml(const Graph& g, const std::string& name, const EdgeStyle* style) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"int\"/>\n"
        << "  <key id=\"target\" for=\"node\" attr.name=\"target\" attr.type=\"boolean\">\n"
        << "    <default>false</default>\n  </key>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"important\" for=\"edge\" attr.name=\"important\" attr.type=\"boolean\">\n"
        << "    <default>false</default>\n  </key>\n"
        << "  <graph id=\"" << escape_xml(name) << "\" edgedefault=\"undirected\">\n";
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        out << "    <node id=\"n" << v << "\">";
        if (g.node_labels()) out << "<data key=\"label\">" << (*g.node_labels())[v] << "</data>";
        if (g.target_node() && *g.target_node() == v) out << "<data key=\"target\">true</data>";
        out << "</node>\n";
    }
    std::size_t id = 0;
    for (const Edge& e : g.edges()) {
        out << "    <edge id=\"e" << id++ << "\" source=\"n" << e.u << "\" target=\"n" << e.v << "\">";
        if (style) {
            out << "<data key=\"weight\">" << text::exact(style->mask->weight(e)) << "</data>";
            if (style->important.contains(e)) out << "<data key=\"important\">true</data>";
        }
        out << "</edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

EdgeStyle style_of(const Explanation& e) {
    EdgeStyle s;
    s.mask = &e.mask;
    s.important.insert(e.selected_edges.begin(), e.selected_edges.end());
    return s;
}

} // namespace

std::string to_dot(const Graph& g, const std::string& name) { return dot(g, name, nullptr); }

std::string to_dot(const Explanation& e, const std::string& name) {
    const EdgeStyle s = style_of(e);
    return dot(*e.source, name, &s);
}

std::string to_graphml(const Graph& g, const std::string& name) { return graphml(g, name, nullptr); }

std::string to_graphml(const Explanation& e, const std::string& name) {
    const EdgeStyle s = style_of(e);
    return graphml(*e.source, name, &s);
}

} // namespace acx::viz
