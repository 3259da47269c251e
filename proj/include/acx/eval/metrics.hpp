#pragma once

#include <span>
#include <vector>

#include "acx/gnn/model.hpp"
#include "acx/graph/mask.hpp"

namespace acx::eval {

/// Per-instance contributions to the three metrics.
struct InstanceTerms {
    bool label_preserved = false; // f(G) == f(G^s)
    double fid_plus = 0.0;        // p(l̂|G) - p(l̂|G without the selected edges)
    double fid_minus = 0.0;       // p(l̂|G) - p(l̂|selected edges only)
};

InstanceTerms instance_terms(const gnn::GnnModel& f, const Explanation& e);

/// Mean of `values` independent of their order: sorted, then compensated sum.
double stable_mean(std::vector<double> values);

// All three throw UsageError on an empty explanation set.
double acc_exp(const gnn::GnnModel& f, std::span<const Explanation> explanations);
double fidelity_plus(const gnn::GnnModel& f, std::span<const Explanation> explanations);
double fidelity_minus(const gnn::GnnModel& f, std::span<const Explanation> explanations);

struct Summary {
    double acc_exp = 0.0;
    double fid_plus = 0.0;
    double fid_minus = 0.0;
};

/// All three metrics in one pass; instances are evaluated on `jobs` threads.
Summary summarize(const gnn::GnnModel& f, std::span<const Explanation> explanations, std::size_t jobs = 1);

} // namespace acx::eval
