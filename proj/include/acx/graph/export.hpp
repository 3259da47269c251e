#pragma once

#include <string>

#include "acx/graph/graph.hpp"
#include "acx/graph/mask.hpp"

namespace acx::viz {

/// Attribute names shared by both formats:
///   node  label     class id (node tasks), omitted otherwise
///   node  target    true on the explained node
///   edge  weight    mask weight (explanations only)
///   edge  important true on selected edges (explanations only)
/// DOT additionally styles important edges `style=bold, color=red`.
std::string to_dot(const Graph& g, const std::string& name = "G");
std::string to_dot(const Explanation& e, const std::string& name = "G");
std::string to_graphml(const Graph& g, const std::string& name = "G");
std::string to_graphml(const Explanation& e, const std::string& name = "G");

} // namespace acx::viz
