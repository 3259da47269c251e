#include "acx/explainer/networks.hpp"

#include "acx/core/checksum.hpp"
#include "acx/core/error.hpp"
#include "acx/core/random.hpp"
#include "acx/core/text.hpp"
#include "acx/gnn/layers.hpp"
#include "acx/gnn/weight_file.hpp"

namespace acx::explainer {
namespace {

gnn::ShapeList conv_shapes(std::size_t input, const std::vector<std::size_t>& hidden) {
    gnn::ShapeList s;
    std::size_t in = input;
    for (std::size_t h : hidden) {
        s.emplace_back(in, h);
        s.emplace_back(1, h);
        in = h;
    }
    return s;
}

gnn::ShapeList generator_shapes(std::size_t input, const std::vector<std::size_t>& hidden) {
    auto s = conv_shapes(input, hidden);
    s.emplace_back(1, 1);
    return s;
}

gnn::ShapeList discriminator_shapes(std::size_t input, std::size_t classes, const std::vector<std::size_t>& hidden) {
    auto s = conv_shapes(input, hidden);
    s.emplace_back(hidden.back(), 1);
    s.emplace_back(1, 1);
    s.emplace_back(hidden.back(), classes);
    s.emplace_back(1, classes);
    return s;
}

void check_shapes(const char* what, const gnn::ShapeList& shapes, const std::vector<Matrix>& params) {
    if (shapes.size() != params.size()) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(shapes.size()) +
                             " parameter matrices, got " + std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (params[i].rows() != shapes[i].first || params[i].cols() != shapes[i].second) {
            throw DimensionError(std::string(what) + ": parameter " + std::to_string(i) + " is " +
                                 params[i].shape_string() + ", expected " +
                                 shape_string(shapes[i].first, shapes[i].second));
        }
    }
}

std::vector<std::size_t> widths(std::size_t input, const std::vector<std::size_t>& hidden) {
    std::vector<std::size_t> w{input};
    w.insert(w.end(), hidden.begin(), hidden.end());
    return w;
}

std::size_t meta_count(const std::map<std::string, std::string>& meta, const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw FormatError("generator: missing '" + key + "' metadata");
    auto v = text::parse_int(it->second);
    if (!v || *v < 0) throw FormatError("generator: bad '" + key + "' metadata");
    return static_cast<std::size_t>(*v);
}

} // namespace

Matrix node_inputs(const Graph& g, bool target_flag) {
    if (!target_flag) return g.features();
    const Matrix& x = g.features();
    Matrix out(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j);
    if (!g.target_node()) throw UsageError("explainer: node-classification instance without a target node");
    out(*g.target_node(), x.cols()) = 1.0;
    return out;
}

Generator::Generator(std::size_t feature_width, std::size_t classes, bool target_flag, std::vector<std::size_t> hidden,
                     std::vector<Matrix> params)
    : feature_width_(feature_width), classes_(classes), target_flag_(target_flag), hidden_(std::move(hidden)),
      params_(std::move(params)) {
    if (hidden_.empty() || classes_ == 0) throw DimensionError("generator: needs at least one layer and one class");
    check_shapes("generator", generator_shapes(feature_width_ + classes_ + (target_flag_ ? 1 : 0), hidden_), params_);
}

Generator Generator::initialize(std::size_t feature_width, std::size_t classes, bool target_flag, std::uint64_t seed,
                                std::vector<std::size_t> hidden) {
    Rng rng(seed);
    std::vector<Matrix> params;
    gnn::init_layers(params, widths(feature_width + classes + (target_flag ? 1 : 0), hidden), rng);
    params.emplace_back(1, 1);
    return Generator(feature_width, classes, target_flag, std::move(hidden), std::move(params));
}

std::uint64_t Generator::checksum() const { return acx::checksum(params_); }

ad::Var Generator::apply(std::span<const ad::Var> params, const Graph& g, int label) const {
    if (label < 0 || static_cast<std::size_t>(label) >= classes_) {
        throw UsageError("generator: label " + std::to_string(label) + " outside 0.." + std::to_string(classes_ - 1));
    }
    if (g.features().cols() != feature_width_) {
        throw DimensionError("generator: features have " + std::to_string(g.features().cols()) +
                             " columns, expected " + std::to_string(feature_width_));
    }
    const std::size_t n = g.node_count();
    const Matrix base = node_inputs(g, target_flag_);
    Matrix input(n, base.cols() + classes_);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < base.cols(); ++j) input(i, j) = base(i, j);
        input(i, base.cols() + static_cast<std::size_t>(label)) = 1.0;
    }
    ad::Tape& tape = params[0].tape();
    const std::size_t conv = 2 * hidden_.size();
    ad::Var adjacency = tape.constant(g.adjacency());
    ad::Var z = gnn::convolve(ad::gcn_normalize(adjacency), tape.constant(std::move(input)), params.first(conv), false);
    ad::Var bias = ad::matmul(ad::matmul(tape.constant(Matrix(n, 1, 1.0)), params[conv]), tape.constant(Matrix(1, n, 1.0)));
    // inner products grow with the embedding width; unscaled they pin the sigmoid at 1
    const double inv_width = 1.0 / static_cast<double>(hidden_.back());
    ad::Var scores = ad::sigmoid(ad::add(ad::scale(ad::matmul(z, ad::transpose(z)), inv_width), bias));
    return ad::multiply(ad::symmetrize(scores), adjacency);
}

WeightedMask Generator::mask(const Graph& g, int label) const {
    ad::Tape tape;
    const auto vars = gnn::bind(tape, params_, false);
    return WeightedMask::from_dense(g, apply(vars, g, label).value());
}

Discriminator::Discriminator(std::size_t input_width, std::size_t classes, std::vector<std::size_t> hidden,
                             std::vector<Matrix> params)
    : input_width_(input_width), classes_(classes), hidden_(std::move(hidden)), params_(std::move(params)) {
    if (hidden_.empty() || classes_ == 0) throw DimensionError("discriminator: needs at least one layer and one class");
    check_shapes("discriminator", discriminator_shapes(input_width_, classes_, hidden_), params_);
}

Discriminator Discriminator::initialize(std::size_t input_width, std::size_t classes, std::uint64_t seed,
                                        std::vector<std::size_t> hidden) {
    Rng rng(seed);
    std::vector<Matrix> params;
    gnn::init_layers(params, widths(input_width, hidden), rng);
    const std::size_t src[] = {hidden.back(), 1};
    gnn::init_layers(params, src, rng);
    const std::size_t cls[] = {hidden.back(), classes};
    gnn::init_layers(params, cls, rng);
    return Discriminator(input_width, classes, std::move(hidden), std::move(params));
}

std::uint64_t Discriminator::checksum() const { return acx::checksum(params_); }

Discriminator::Output Discriminator::apply(std::span<const ad::Var> params, ad::Var adjacency,
                                           const Matrix& inputs) const {
    if (inputs.cols() != input_width_) {
        throw DimensionError("discriminator: inputs have " + std::to_string(inputs.cols()) + " columns, expected " +
                             std::to_string(input_width_));
    }
    if (adjacency.rows() != inputs.rows()) {
        throw DimensionError("discriminator: adjacency " + adjacency.value().shape_string() + " vs inputs " +
                             inputs.shape_string());
    }
    ad::Tape& tape = adjacency.tape();
    const std::size_t conv = 2 * hidden_.size();
    ad::Var h = gnn::convolve(ad::gcn_normalize(adjacency), tape.constant(inputs), params.first(conv), true);
    ad::Var pooled = ad::mean_rows(h);
    return {ad::sigmoid(gnn::linear(pooled, params[conv], params[conv + 1])),
            gnn::linear(pooled, params[conv + 2], params[conv + 3])};
}

Discriminator::Prediction Discriminator::predict(const Matrix& adjacency, const Matrix& inputs) const {
    ad::Tape tape;
    const auto vars = gnn::bind(tape, params_, false);
    const Output out = apply(vars, tape.constant(adjacency), inputs);
    Prediction p;
    p.p_real = std::clamp(out.source.value()(0, 0), ad::kLogEps, 1.0 - ad::kLogEps);
    const Matrix probs = ad::softmax_rows(out.class_logits).value();
    p.classes.assign(probs.data().begin(), probs.data().end());
    return p;
}

std::string format_generator(const Generator& g, std::map<std::string, std::string> meta) {
    meta["feature_width"] = std::to_string(g.feature_width());
    meta["target_flag"] = g.target_flag() ? "1" : "0";
    const std::size_t input = g.feature_width() + g.classes() + (g.target_flag() ? 1 : 0);
    gnn::WeightFile f{"gen", widths(input, g.hidden()), g.classes(), std::move(meta),
                      {g.parameters().begin(), g.parameters().end()}};
    return gnn::format_weight_file(f);
}

Generator parse_generator(std::string_view content, std::map<std::string, std::string>* meta) {
    auto shapes = [](const gnn::WeightFile& f) {
        if (f.tag != "gen") throw FormatError("generator: unexpected component tag '" + f.tag + "'");
        if (f.widths.size() < 2) throw FormatError("generator: no layers");
        return generator_shapes(f.widths.front(), {f.widths.begin() + 1, f.widths.end()});
    };
    gnn::WeightFile f = gnn::parse_weight_file(content, shapes);
    const std::size_t feature_width = meta_count(f.meta, "feature_width");
    const bool flag = meta_count(f.meta, "target_flag") != 0;
    if (feature_width + f.classes + (flag ? 1 : 0) != f.widths.front()) {
        throw FormatError("generator: input width disagrees with metadata");
    }
    if (meta) *meta = f.meta;
    return Generator(feature_width, f.classes, flag, {f.widths.begin() + 1, f.widths.end()}, std::move(f.matrices));
}

std::string format_discriminator(const Discriminator& d, std::map<std::string, std::string> meta) {
    gnn::WeightFile f{"disc", widths(d.input_width(), d.hidden()), d.classes(), std::move(meta),
                      {d.parameters().begin(), d.parameters().end()}};
    return gnn::format_weight_file(f);
}

Discriminator parse_discriminator(std::string_view content, std::map<std::string, std::string>* meta) {
    auto shapes = [](const gnn::WeightFile& f) {
        if (f.tag != "disc") throw FormatError("discriminator: unexpected component tag '" + f.tag + "'");
        if (f.widths.size() < 2) throw FormatError("discriminator: no layers");
        return discriminator_shapes(f.widths.front(), f.classes, {f.widths.begin() + 1, f.widths.end()});
    };
    gnn::WeightFile f = gnn::parse_weight_file(content, shapes);
    if (meta) *meta = f.meta;
    return Discriminator(f.widths.front(), f.classes, {f.widths.begin() + 1, f.widths.end()}, std::move(f.matrices));
}

void save_generator(const std::filesystem::path& path, const Generator& g,
                    const std::map<std::string, std::string>& meta) {
    text::write_file_atomic(path, format_generator(g, meta));
}

Generator load_generator(const std::filesystem::path& path, std::map<std::string, std::string>* meta) {
    return parse_generator(text::read_file(path), meta);
}

void save_discriminator(const std::filesystem::path& path, const Discriminator& d,
                        const std::map<std::string, std::string>& meta) {
    text::write_file_atomic(path, format_discriminator(d, meta));
}

Discriminator load_discriminator(const std::filesystem::path& path, std::map<std::string, std::string>* meta) {
    return parse_discriminator(text::read_file(path), meta);
}

} // namespace acx::explainer
