#include "acx/eval/report.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"

namespace acx::eval {
namespace {

std::string normalized(const std::string& s) {
    std::string n;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c))) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return n;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

} // namespace

const MetricsCell* MetricsReport::find(const std::string& explainer, const SubgraphSpec& spec) const {
    for (const auto& c : cells)
        if (c.explainer == explainer && c.selector == spec) return &c;
    return nullptr;
}

std::vector<SubgraphSpec> default_grid(const std::string& dataset) {
    const std::string n = normalized(dataset);
    std::vector<SubgraphSpec> grid;
    if (n == "bashapes") {
        for (std::size_t k = 5; k <= 9; ++k) grid.push_back(SubgraphSpec::top_k(k));
    } else if (n == "treecycles") {
        for (std::size_t k = 6; k <= 10; ++k) grid.push_back(SubgraphSpec::top_k(k));
    } else {
        for (double r : {0.5, 0.6, 0.7, 0.8, 0.9}) grid.push_back(SubgraphSpec::top_r(r));
    }
    return grid;
}

MetricsReport sweep(const gnn::GnnModel& f, const std::string& dataset,
                    const std::vector<const data::Instance*>& instances, std::span<const ExplainerMasks> explainers,
                    std::span<const SubgraphSpec> specs, std::size_t jobs) {
    if (instances.empty()) throw UsageError("sweep: no instances to evaluate");
    std::vector<int> labels;
    labels.reserve(instances.size());
    for (const auto* inst : instances) labels.push_back(gnn::predict_label(f, *inst->graph).label);

    MetricsReport report;
    report.dataset = dataset;
    for (const auto& ex : explainers) {
        if (ex.masks.size() != instances.size()) {
            throw UsageError("sweep: explainer '" + ex.name + "' has " + std::to_string(ex.masks.size()) +
                             " masks for " + std::to_string(instances.size()) + " instances");
        }
        for (const auto& spec : specs) {
            std::vector<Explanation> explanations;
            explanations.reserve(instances.size());
            for (std::size_t i = 0; i < instances.size(); ++i) {
                explanations.push_back(make_explanation(instances[i]->graph, ex.masks[i], spec, labels[i], ex.name));
            }
            const Summary s = summarize(f, explanations, jobs);
            report.cells.push_back({ex.name, spec, s.fid_plus, s.fid_minus, s.acc_exp});
        }
    }
    return report;
}

std::string format_report_csv(const MetricsReport& r) {
    std::ostringstream out;
    out << "dataset,explainer,selector,fid_plus,fid_minus,acc_exp\n";
    for (const auto& c : r.cells) {
        out << r.dataset << ',' << c.explainer << ',' << c.selector.label() << ',' << text::fixed(c.fid_plus, 4) << ','
            << text::fixed(c.fid_minus, 4) << ',' << text::fixed(c.acc_exp, 4) << '\n';
    }
    return out.str();
}

MetricsReport parse_report_csv(std::string_view content) {
    MetricsReport r;
    std::size_t line_no = 0;
    for (std::string_view line : text::split(content, '\n')) {
        ++line_no;
        line = text::trim(line);
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "dataset,explainer,selector,fid_plus,fid_minus,acc_exp")
                throw FormatError("report: line 1: unexpected header");
            continue;
        }
        const auto f = text::split(line, ',');
        if (f.size() != 6) throw FormatError("report: line " + std::to_string(line_no) + ": expected 6 fields");
        const auto plus = text::parse_double(f[3]);
        const auto minus = text::parse_double(f[4]);
        const auto acc = text::parse_double(f[5]);
        if (!plus || !minus || !acc) throw FormatError("report: line " + std::to_string(line_no) + ": bad number");
        r.dataset = std::string(f[0]);
        r.cells.push_back({std::string(f[1]), SubgraphSpec::parse(std::string(f[2])), *plus, *minus, *acc});
    }
    return r;
}

std::string render_table(const MetricsReport& r) {
    std::vector<std::string> explainers;
    std::vector<SubgraphSpec> specs;
    for (const auto& c : r.cells) {
        if (std::find(explainers.begin(), explainers.end(), c.explainer) == explainers.end())
            explainers.push_back(c.explainer);
        if (std::find(specs.begin(), specs.end(), c.selector) == specs.end()) specs.push_back(c.selector);
    }
    std::size_t name_w = std::max<std::size_t>(9, r.dataset.size());
    for (const auto& e : explainers) name_w = std::max(name_w, e.size());
    constexpr std::size_t cell_w = 8;

    std::ostringstream out;
    out << std::string(name_w, ' ');
    for (const auto& s : specs) {
        const std::string title = s.label();
        const std::size_t w = 3 * cell_w + 2;
        const std::size_t left = (w - std::min(w, title.size())) / 2;
        out << " |" << std::string(left, ' ') << title << std::string(w - left - std::min(w, title.size()), ' ');
    }
    out << '\n' << pad(r.dataset, name_w);
    for (std::size_t i = 0; i < specs.size(); ++i) out << " |" << pad("Fid+", cell_w) << pad("Fid-", cell_w + 1) << pad("ACC", cell_w + 1);
    out << '\n';
    for (const auto& e : explainers) {
        out << pad(e, name_w);
        for (const auto& s : specs) {
            const MetricsCell* c = r.find(e, s);
            out << " |";
            if (c) {
                out << pad(text::fixed(c->fid_plus, 4), cell_w) << pad(text::fixed(c->fid_minus, 4), cell_w + 1)
                    << pad(text::fixed(c->acc_exp, 4), cell_w + 1);
            } else {
                out << pad("--", cell_w) << pad("--", cell_w + 1) << pad("--", cell_w + 1);
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace acx::eval
