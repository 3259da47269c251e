#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "acx/data/workload.hpp"
#include "acx/eval/metrics.hpp"

namespace acx::eval {

struct MetricsCell {
    std::string explainer;
    SubgraphSpec selector;
    double fid_plus = 0.0;
    double fid_minus = 0.0;
    double acc_exp = 0.0;

    friend bool operator==(const MetricsCell&, const MetricsCell&) = default;
};

struct MetricsReport {
    std::string dataset;
    std::vector<MetricsCell> cells;
    std::map<std::string, std::string> meta; // seed, checksums, snapshot

    const MetricsCell* find(const std::string& explainer, const SubgraphSpec& spec) const;
};

/// K = 5..9 for BA-Shapes, K = 6..10 for Tree-Cycles, R = 0.5..0.9 otherwise.
std::vector<SubgraphSpec> default_grid(const std::string& dataset);

/// Masks of one explainer for every evaluated instance, in instance order.
struct ExplainerMasks {
    std::string name;
    std::vector<WeightedMask> masks;
};

/// Full grid of cells, explainers in the given order, specs in grid order.
/// Labels under f are recomputed from the instances.
MetricsReport sweep(const gnn::GnnModel& f, const std::string& dataset,
                    const std::vector<const data::Instance*>& instances, std::span<const ExplainerMasks> explainers,
                    std::span<const SubgraphSpec> specs, std::size_t jobs = 1);

// Header dataset,explainer,selector,fid_plus,fid_minus,acc_exp; four decimals.
std::string format_report_csv(const MetricsReport& r);
MetricsReport parse_report_csv(std::string_view text);

/// Aligned text table: one row per explainer, a Fid+/Fid-/ACC triplet per
/// selector column. Missing cells print as "--".
std::string render_table(const MetricsReport& r);

} // namespace acx::eval
