#include "acx/explainer/acgan.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "acx/core/adam.hpp"
#include "acx/core/error.hpp"
#include "acx/core/random.hpp"
#include "acx/core/text.hpp"
#include "acx/eval/metrics.hpp"
#include "acx/gnn/layers.hpp"

namespace acx::explainer {
namespace {

const Matrix kOne(1, 1, 1.0);
const Matrix kZero(1, 1, 0.0);

Matrix one_hot(std::size_t classes, int label) {
    Matrix m(1, classes);
    m(0, static_cast<std::size_t>(label)) = 1.0;
    return m;
}

ad::Var mean_loss(std::span<const Discriminator::Output> outs, ad::Loss kind, const Matrix& target) {
    std::vector<ad::Var> terms;
    terms.reserve(outs.size());
    for (const auto& o : outs) terms.push_back(ad::loss(kind, o.source, target));
    return ad::mean_of(terms);
}

ad::Var mean_class_loss(std::span<const Discriminator::Output> outs, std::span<const int> labels) {
    std::vector<ad::Var> terms;
    terms.reserve(outs.size());
    for (std::size_t i = 0; i < outs.size(); ++i) {
        terms.push_back(ad::loss(ad::Loss::softmax_cross_entropy, outs[i].class_logits,
                                 one_hot(outs[i].class_logits.cols(), labels[i])));
    }
    return ad::mean_of(terms);
}

void require_batch(std::size_t a, std::size_t b, std::size_t labels) {
    if (a == 0 || a != b || a != labels) throw UsageError("acgan: batches must be non-empty and equally sized");
}

std::vector<int> labels_of(std::span<const Sample> batch) {
    std::vector<int> l;
    l.reserve(batch.size());
    for (const auto& s : batch) l.push_back(s.label);
    return l;
}

double mean_validation_acc(const Generator& g, const gnn::GnnModel& f,
                           std::span<const std::shared_ptr<const Graph>> validation,
                           const std::vector<SubgraphSpec>& grid) {
    if (validation.empty() || grid.empty()) return 0.0;
    std::vector<WeightedMask> masks;
    std::vector<int> labels;
    for (const auto& graph : validation) {
        labels.push_back(gnn::predict_label(f, *graph).label);
        masks.push_back(g.mask(*graph, labels.back()));
    }
    std::vector<double> accs;
    for (const auto& spec : grid) {
        std::vector<Explanation> ex;
        for (std::size_t i = 0; i < validation.size(); ++i)
            ex.push_back(make_explanation(validation[i], masks[i], spec, labels[i], "acgan"));
        accs.push_back(eval::acc_exp(f, ex));
    }
    return eval::stable_mean(accs);
}

} // namespace

Sample make_sample(const gnn::GnnModel& f, std::shared_ptr<const Graph> graph, WeightedMask truth) {
    const auto pred = gnn::predict_label(f, *graph);
    return {std::move(graph), std::move(truth), pred.label, pred.probabilities};
}

DiscriminatorLoss discriminator_loss(std::span<const Discriminator::Output> real,
                                     std::span<const Discriminator::Output> fake, std::span<const int> labels) {
    require_batch(real.size(), fake.size(), labels.size());
    DiscriminatorLoss l;
    l.source = ad::add(mean_loss(real, ad::Loss::binary_cross_entropy, kOne),
                       mean_loss(fake, ad::Loss::binary_cross_entropy, kZero));
    l.classes = ad::add(mean_class_loss(real, labels), mean_class_loss(fake, labels));
    l.total = ad::add(l.source, l.classes);
    return l;
}

ad::Var base_generator_loss(std::span<const Discriminator::Output> fake, std::span<const int> labels) {
    require_batch(fake.size(), fake.size(), labels.size());
    return ad::add(mean_loss(fake, ad::Loss::binary_cross_entropy, kOne), mean_class_loss(fake, labels));
}

DiscriminatorLoss loss_discriminator(ad::Tape& tape, const Discriminator& d, std::span<const ad::Var> d_params,
                                     std::span<const Sample> batch, std::span<const WeightedMask> fake_masks) {
    require_batch(batch.size(), fake_masks.size(), batch.size());
    const bool flag = batch.front().graph->task() == TaskKind::node;
    std::vector<Discriminator::Output> real, fake;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Graph& g = *batch[i].graph;
        const Matrix inputs = node_inputs(g, flag);
        real.push_back(d.apply(d_params, tape.constant(apply_mask(g, batch[i].truth).adjacency), inputs));
        fake.push_back(d.apply(d_params, tape.constant(apply_mask(g, fake_masks[i]).adjacency), inputs));
    }
    return discriminator_loss(real, fake, labels_of(batch));
}

GeneratorLoss loss_generator(ad::Tape& tape, const Generator& g, std::span<const ad::Var> g_params,
                             const Discriminator& d, std::span<const ad::Var> d_params, const gnn::GnnModel& f,
                             std::span<const Sample> batch, double lambda) {
    if (batch.empty()) throw UsageError("acgan: empty batch");
    if (!(lambda >= 0.0)) throw UsageError("acgan: lambda must be >= 0");
    const auto f_params = gnn::bind(tape, f.parameters(), false);
    std::vector<Discriminator::Output> fake;
    std::vector<ad::Var> fid;
    for (const auto& s : batch) {
        const Graph& graph = *s.graph;
        ad::Var masked = g.apply(g_params, graph, s.label);
        fake.push_back(d.apply(d_params, masked, node_inputs(graph, g.target_flag())));
        ad::Var probs = ad::softmax_rows(f.apply(f_params, masked, graph.features()));
        const std::size_t row = f.architecture().task == TaskKind::node ? *graph.target_node() : 0;
        fid.push_back(ad::loss(ad::Loss::mse, ad::pick_row(probs, row),
                               Matrix(1, s.f_row.size(), std::vector<double>(s.f_row))));
    }
    const auto labels = labels_of(batch);
    GeneratorLoss l;
    l.adversarial = mean_loss(fake, ad::Loss::binary_cross_entropy, kOne);
    l.classes = mean_class_loss(fake, labels);
    l.fidelity = ad::mean_of(fid);
    l.total = ad::add(ad::add(l.adversarial, l.classes), ad::scale(l.fidelity, lambda));
    return l;
}

TrainedExplainer train_acgan(const gnn::GnnModel& f, std::span<const Sample> train,
                             std::span<const std::shared_ptr<const Graph>> validation,
                             const ExplainerTrainConfig& config) {
    if (train.empty()) throw DataError("train-explainer: no training samples");
    if (!(config.lambda >= 0.0)) throw UsageError("train-explainer: lambda must be >= 0");
    if (config.batch_size < 1 || config.epochs < 1) throw UsageError("train-explainer: epochs and batch size must be >= 1");
    for (const auto& s : train) {
        if (s.truth.node_count() != s.graph->node_count()) throw DataError("train-explainer: ground truth does not fit its graph");
    }
    const std::size_t classes = f.architecture().classes;
    const std::size_t features = f.architecture().input_width;
    const bool flag = f.architecture().task == TaskKind::node;

    TrainedExplainer out;
    Generator gen = Generator::initialize(features, classes, flag, derive_seed(config.seed, 11));
    Discriminator disc = Discriminator::initialize(features + (flag ? 1 : 0), classes, derive_seed(config.seed, 12));
    out.generator = gen;
    AdamState g_state, d_state;
    const AdamConfig g_opt{config.generator_lr};
    const AdamConfig d_opt{config.discriminator_lr};
    Rng rng(derive_seed(config.seed, 13));

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        std::vector<double> ls, ll, ld, lg, lf;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            try {
                const std::size_t end = std::min(order.size(), start + config.batch_size);
                std::vector<Sample> batch;
                for (std::size_t i = start; i < end; ++i) batch.push_back(train[order[i]]);

                std::vector<WeightedMask> fake;
                for (const auto& s : batch) fake.push_back(gen.mask(*s.graph, s.label));
                {
                    ad::Tape tape;
                    const auto dv = gnn::bind(tape, disc.parameters(), true);
                    const auto l = loss_discriminator(tape, disc, dv, batch, fake);
                    tape.backward(l.total);
                    std::vector<Matrix> grads;
                    for (const auto& v : dv) grads.push_back(tape.grad(v));
                    adam_step(disc.mutable_parameters(), grads, d_state, d_opt);
                    ls.push_back(l.source.value()(0, 0));
                    ll.push_back(l.classes.value()(0, 0));
                    ld.push_back(l.total.value()(0, 0));
                }
                {
                    ad::Tape tape;
                    const auto gv = gnn::bind(tape, gen.parameters(), true);
                    const auto dv = gnn::bind(tape, disc.parameters(), false);
                    const auto l = loss_generator(tape, gen, gv, disc, dv, f, batch, config.lambda);
                    tape.backward(l.total);
                    std::vector<Matrix> grads;
                    for (const auto& v : gv) grads.push_back(tape.grad(v));
                    adam_step(gen.mutable_parameters(), grads, g_state, g_opt);
                    lg.push_back(l.total.value()(0, 0));
                    lf.push_back(l.fidelity.value()(0, 0));
                }
            } catch (const NumericalError& e) {
                throw NumericalError("train-explainer: epoch " + std::to_string(epoch) + " batch " +
                                     std::to_string(batch_index) + ": " + e.what());
            }
        }
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        out.report.push_back({epoch, mean(ls), mean(ll), mean(ld), mean(lg), mean(lf)});

        const double acc = mean_validation_acc(gen, f, validation, config.validation_grid);
        if (config.on_epoch) config.on_epoch(out.report.back(), acc, gen);
        if (acc > out.best_validation_acc) {
            out.best_validation_acc = acc;
            out.best_epoch = epoch;
            out.generator = gen;
        }
    }
    out.discriminator = disc;
    return out;
}

Explanation explain(const Generator& g, const gnn::GnnModel& f, std::shared_ptr<const Graph> graph,
                    const SubgraphSpec& spec) {
    const int label = gnn::predict_label(f, *graph).label;
    WeightedMask mask = g.mask(*graph, label);
    return make_explanation(std::move(graph), std::move(mask), spec, label, "acgan");
}

double default_lambda(const std::string& dataset) {
    std::string n;
    for (char c : dataset)
        if (std::isalnum(static_cast<unsigned char>(c))) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (n == "bashapes" || n == "treecycles") return 2.0;
    if (n == "nci1") return 4.5;
    return 4.0;
}

std::string format_loss_report(std::span<const LossEntry> report) {
    std::ostringstream out;
    out << "epoch,L_S,L_L,L_D,L_G,L_Fid\n";
    for (const auto& e : report) {
        out << e.epoch << ',' << text::exact(e.l_s) << ',' << text::exact(e.l_l) << ',' << text::exact(e.l_d) << ','
            << text::exact(e.l_g) << ',' << text::exact(e.l_fid) << '\n';
    }
    return out.str();
}

std::vector<LossEntry> parse_loss_report(std::string_view content) {
    std::vector<LossEntry> out;
    std::size_t line_no = 0;
    for (std::string_view line : text::split(content, '\n')) {
        ++line_no;
        line = text::trim(line);
        if (line.empty() || line_no == 1) continue;
        const auto f = text::split(line, ',');
        if (f.size() != 6) throw FormatError("loss report: line " + std::to_string(line_no) + ": expected 6 fields");
        LossEntry e;
        const auto epoch = text::parse_int(f[0]);
        double* slots[] = {&e.l_s, &e.l_l, &e.l_d, &e.l_g, &e.l_fid};
        if (!epoch) throw FormatError("loss report: line " + std::to_string(line_no) + ": bad epoch");
        e.epoch = static_cast<std::size_t>(*epoch);
        for (std::size_t i = 0; i < 5; ++i) {
            const auto v = text::parse_double(f[i + 1]);
            if (!v) throw FormatError("loss report: line " + std::to_string(line_no) + ": bad number");
            *slots[i] = *v;
        }
        out.push_back(e);
    }
    return out;
}

} // namespace acx::explainer
