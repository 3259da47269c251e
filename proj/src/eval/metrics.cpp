#include "acx/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "acx/core/error.hpp"

namespace acx::eval {
namespace {

void require_nonempty(std::span<const Explanation> e) {
    if (e.empty()) throw UsageError("metrics: empty explanation set");
}

std::vector<InstanceTerms> all_terms(const gnn::GnnModel& f, std::span<const Explanation> explanations,
                                     std::size_t jobs) {
    require_nonempty(explanations);
    std::vector<InstanceTerms> terms(explanations.size());
    std::vector<std::string> errors(explanations.size());
    const long n = static_cast<long>(explanations.size());
    const int threads = static_cast<int>(std::max<std::size_t>(1, jobs));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        try {
            terms[i] = instance_terms(f, explanations[i]);
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalError("metrics: " + e);
    return terms;
}

} // namespace

InstanceTerms instance_terms(const gnn::GnnModel& f, const Explanation& e) {
    const Graph& g = *e.source;
    const auto original = gnn::predict_label(f, g);
    const auto l = static_cast<std::size_t>(original.label);
    const auto kept = gnn::predict_label(f, binarize(g, e.selected_edges));
    const auto removed = gnn::predict_label(f, occlude(g, e.selected_edges));
    InstanceTerms t;
    t.label_preserved = kept.label == original.label;
    t.fid_plus = original.probabilities[l] - removed.probabilities[l];
    t.fid_minus = original.probabilities[l] - kept.probabilities[l];
    return t;
}

double stable_mean(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return (sum + comp) / static_cast<double>(values.size());
}

Summary summarize(const gnn::GnnModel& f, std::span<const Explanation> explanations, std::size_t jobs) {
    const auto terms = all_terms(f, explanations, jobs);
    std::vector<double> acc, plus, minus;
    acc.reserve(terms.size());
    plus.reserve(terms.size());
    minus.reserve(terms.size());
    for (const auto& t : terms) {
        acc.push_back(t.label_preserved ? 1.0 : 0.0);
        plus.push_back(t.fid_plus);
        minus.push_back(t.fid_minus);
    }
    return {stable_mean(std::move(acc)), stable_mean(std::move(plus)), stable_mean(std::move(minus))};
}

double acc_exp(const gnn::GnnModel& f, std::span<const Explanation> explanations) {
    return summarize(f, explanations).acc_exp;
}

double fidelity_plus(const gnn::GnnModel& f, std::span<const Explanation> explanations) {
    return summarize(f, explanations).fid_plus;
}

double fidelity_minus(const gnn::GnnModel& f, std::span<const Explanation> explanations) {
    return summarize(f, explanations).fid_minus;
}

} // namespace acx::eval
