#include "acx/gnn/model.hpp"

#include "acx/core/checksum.hpp"
#include "acx/core/error.hpp"
#include "acx/core/random.hpp"
#include "acx/core/text.hpp"
#include "acx/gnn/layers.hpp"
#include "acx/gnn/weight_file.hpp"

namespace acx::gnn {
namespace {

std::vector<std::size_t> widths_of(const Architecture& a) {
    std::vector<std::size_t> w{a.input_width};
    w.insert(w.end(), a.hidden.begin(), a.hidden.end());
    return w;
}

ShapeList expected_shapes(const Architecture& a) {
    ShapeList s;
    const auto w = widths_of(a);
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        s.emplace_back(w[l], w[l + 1]);
        s.emplace_back(1, w[l + 1]);
    }
    s.emplace_back(w.back(), a.classes);
    s.emplace_back(1, a.classes);
    return s;
}

const char* task_tag(TaskKind t) { return t == TaskKind::node ? "node" : "graph"; }

} // namespace

Architecture default_architecture(TaskKind task, std::size_t input_width, std::size_t classes) {
    const std::size_t h = task == TaskKind::node ? 32 : 64;
    return {task, input_width, {h, h, h}, classes};
}

GnnModel::GnnModel(Architecture arch, std::vector<Matrix> params) : arch_(std::move(arch)), params_(std::move(params)) {
    if (arch_.hidden.empty() || arch_.classes == 0 || arch_.input_width == 0) {
        throw DimensionError("gnn: architecture needs at least one layer, one class and one input column");
    }
    const auto shapes = expected_shapes(arch_);
    if (shapes.size() != params_.size()) {
        throw DimensionError("gnn: expected " + std::to_string(shapes.size()) + " parameter matrices, got " +
                             std::to_string(params_.size()));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (params_[i].rows() != shapes[i].first || params_[i].cols() != shapes[i].second) {
            throw DimensionError("gnn: parameter " + std::to_string(i) + " is " + params_[i].shape_string() +
                                 ", expected " + shape_string(shapes[i].first, shapes[i].second));
        }
    }
}

GnnModel GnnModel::initialize(Architecture arch, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Matrix> params;
    const auto w = widths_of(arch);
    init_layers(params, w, rng);
    const std::size_t head[] = {w.back(), arch.classes};
    init_layers(params, head, rng);
    return GnnModel(std::move(arch), std::move(params));
}

std::uint64_t GnnModel::checksum() const { return acx::checksum(params_); }

ad::Var GnnModel::logits(ad::Tape& tape, ad::Var adjacency, const Matrix& features, bool trainable,
                         std::vector<ad::Var>* param_vars) const {
    auto vars = gnn::bind(tape, params_, trainable);
    ad::Var out = apply(vars, adjacency, features);
    if (param_vars) *param_vars = std::move(vars);
    return out;
}

ad::Var GnnModel::apply(std::span<const ad::Var> params, ad::Var adjacency, const Matrix& features) const {
    if (features.cols() != arch_.input_width) {
        throw DimensionError("gnn: features have " + std::to_string(features.cols()) + " columns, model expects " +
                             std::to_string(arch_.input_width));
    }
    if (adjacency.rows() != features.rows()) {
        throw DimensionError("gnn: adjacency " + adjacency.value().shape_string() + " vs features " +
                             features.shape_string());
    }
    if (params.size() != params_.size()) throw UsageError("gnn: wrong number of bound parameters");
    ad::Tape& tape = adjacency.tape();
    const std::size_t conv = 2 * arch_.hidden.size();
    ad::Var h = convolve(ad::gcn_normalize(adjacency), tape.constant(features), params.first(conv), true);
    if (arch_.task == TaskKind::graph) h = ad::mean_rows(h);
    return linear(h, params[conv], params[conv + 1]);
}

ad::Var GnnModel::probabilities(ad::Tape& tape, ad::Var adjacency, const Matrix& features) const {
    return ad::softmax_rows(logits(tape, adjacency, features));
}

Matrix forward(const GnnModel& model, const WeightedGraph& g) {
    ad::Tape tape;
    return model.probabilities(tape, tape.constant(g.adjacency), g.features).value();
}

Matrix forward(const GnnModel& model, const Graph& g) { return forward(model, WeightedGraph::of(g)); }

int argmax(std::span<const double> p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return static_cast<int>(best);
}

std::vector<double> prediction_row(const GnnModel& model, const Matrix& probs, std::optional<std::size_t> target) {
    std::size_t row = 0;
    if (model.architecture().task == TaskKind::node) {
        if (!target) throw UsageError("predict: node-classification input without a target node");
        row = *target;
    }
    const auto r = probs.row(row);
    return {r.begin(), r.end()};
}

Prediction predict_label(const GnnModel& model, const WeightedGraph& g) {
    if (model.architecture().task == TaskKind::node && !g.target_node) {
        throw UsageError("predict: node-classification input without a target node");
    }
    Prediction p;
    p.probabilities = prediction_row(model, forward(model, g), g.target_node);
    p.label = argmax(p.probabilities);
    return p;
}

Prediction predict_label(const GnnModel& model, const Graph& g) { return predict_label(model, WeightedGraph::of(g)); }

std::string format_model(const GnnModel& model, const std::map<std::string, std::string>& meta) {
    const auto& a = model.architecture();
    WeightFile f{task_tag(a.task), widths_of(a), a.classes, meta, {model.parameters().begin(), model.parameters().end()}};
    return format_weight_file(f);
}

GnnModel parse_model(std::string_view text, std::map<std::string, std::string>* meta) {
    Architecture arch;
    auto shapes = [&arch](const WeightFile& f) {
        if (f.tag != "node" && f.tag != "graph") throw FormatError("model: unexpected component tag '" + f.tag + "'");
        if (f.widths.size() < 2) throw FormatError("model: no layers");
        arch.task = f.tag == "node" ? TaskKind::node : TaskKind::graph;
        arch.input_width = f.widths.front();
        arch.hidden.assign(f.widths.begin() + 1, f.widths.end());
        arch.classes = f.classes;
        return expected_shapes(arch);
    };
    WeightFile f = parse_weight_file(text, shapes);
    if (meta) *meta = f.meta;
    return GnnModel(std::move(arch), std::move(f.matrices));
}

void save_model(const std::filesystem::path& path, const GnnModel& model, const std::map<std::string, std::string>& meta) {
    text::write_file_atomic(path, format_model(model, meta));
}

GnnModel load_model(const std::filesystem::path& path, std::map<std::string, std::string>* meta) {
    return parse_model(text::read_file(path), meta);
}

} // namespace acx::gnn
