#include "acx/gnn/train.hpp"

#include <cmath>
#include <sstream>

#include "acx/core/adam.hpp"
#include "acx/core/error.hpp"
#include "acx/core/random.hpp"
#include "acx/core/text.hpp"
#include "acx/gnn/layers.hpp"

namespace acx::gnn {
namespace {

void check_config(const TrainConfig& config) {
    if (config.epochs < 1 || !(config.lr > 0.0)) throw UsageError("train-gnn: epochs >= 1 and lr > 0 required");
    if (!(config.edge_dropout >= 0.0 && config.edge_dropout < 1.0)) {
        throw UsageError("train-gnn: edge dropout must lie in [0, 1)");
    }
}

void check_finite(double loss, std::size_t epoch) {
    if (!std::isfinite(loss)) throw NumericalError("train-gnn: loss diverged at epoch " + std::to_string(epoch));
}

std::vector<Matrix> gradients_with_decay(const ad::Tape& tape, const std::vector<ad::Var>& vars,
                                         std::span<const Matrix> params, double weight_decay) {
    std::vector<Matrix> grads;
    grads.reserve(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Matrix g = tape.grad(vars[i]);
        if (weight_decay != 0.0) {
            auto gd = g.data();
            auto pd = params[i].data();
            for (std::size_t k = 0; k < gd.size(); ++k) gd[k] += weight_decay * pd[k];
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

Matrix drop_edges(const Graph& g, double p, Rng& rng) {
    Matrix a = g.adjacency();
    if (p <= 0.0) return a;
    p = rng.uniform(0.0, p);
    for (const Edge& e : g.edges()) {
        if (rng.uniform() < p) a(e.u, e.v) = a(e.v, e.u) = 0.0;
    }
    return a;
}

} // namespace

double node_accuracy(const GnnModel& model, const Graph& g, const std::vector<std::size_t>& ids) {
    if (ids.empty()) return 0.0;
    const Matrix probs = forward(model, g);
    std::size_t hit = 0;
    for (std::size_t v : ids)
        if (argmax(probs.row(v)) == (*g.node_labels())[v]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(ids.size());
}

double graph_accuracy(const GnnModel& model, const std::vector<Graph>& graphs, const std::vector<std::size_t>& ids) {
    if (ids.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i : ids)
        if (predict_label(model, graphs[i]).label == *graphs[i].graph_label()) ++hit;
    return static_cast<double>(hit) / static_cast<double>(ids.size());
}

TrainResult train_node_model(const Graph& g, const data::SplitIndex& split, const TrainConfig& config) {
    check_config(config);
    if (!g.node_labels()) throw DataError("train-gnn: node task without node labels");
    if (split.train.empty()) throw DataError("train-gnn: empty training split");
    const auto& labels = *g.node_labels();
    std::size_t classes = 0;
    for (int l : labels) classes = std::max(classes, static_cast<std::size_t>(l) + 1);

    GnnModel model = GnnModel::initialize(default_architecture(TaskKind::node, g.features().cols(), classes), config.seed);
    AdamState adam;
    const AdamConfig opt{config.lr};

    Matrix target(g.node_count(), classes);
    for (std::size_t v : split.train) target(v, static_cast<std::size_t>(labels[v])) = 1.0;
    // The loss averages over all rows; rescale so it is the mean over training nodes.
    const double rescale = static_cast<double>(g.node_count()) / static_cast<double>(split.train.size());

    Rng rng(derive_seed(config.seed, 5));
    TrainResult result{model, {}, 0, -1.0};
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        ad::Var logits = model.logits(tape, tape.constant(drop_edges(g, config.edge_dropout, rng)), g.features(), true, &vars);
        ad::Var loss = ad::scale(ad::loss(ad::Loss::softmax_cross_entropy, logits, target), rescale);
        check_finite(loss.value()(0, 0), epoch);
        tape.backward(loss);
        const auto grads = gradients_with_decay(tape, vars, model.parameters(), config.weight_decay);
        adam_step(model.mutable_parameters(), grads, adam, opt);

        TrainLogEntry entry{epoch, loss.value()(0, 0), node_accuracy(model, g, split.train),
                            node_accuracy(model, g, split.validation)};
        result.log.push_back(entry);
        if (entry.validation_accuracy > result.best_validation_accuracy) {
            result.best_validation_accuracy = entry.validation_accuracy;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

TrainResult train_graph_model(const std::vector<Graph>& graphs, const data::SplitIndex& split, const TrainConfig& config) {
    check_config(config);
    if (split.train.empty()) throw DataError("train-gnn: empty training split");
    std::size_t classes = 0;
    for (const auto& g : graphs) {
        if (!g.graph_label()) throw DataError("train-gnn: graph task without graph labels");
        classes = std::max(classes, static_cast<std::size_t>(*g.graph_label()) + 1);
    }
    GnnModel model =
        GnnModel::initialize(default_architecture(TaskKind::graph, graphs.front().features().cols(), classes), config.seed);
    AdamState adam;
    const AdamConfig opt{config.lr};
    Rng rng(derive_seed(config.seed, 7));
    const std::size_t batch = std::max<std::size_t>(1, config.batch_size);

    TrainResult result{model, {}, 0, -1.0};
    std::vector<std::size_t> order = split.train;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            ad::Tape tape;
            const std::vector<ad::Var> vars = gnn::bind(tape, model.parameters(), true);
            std::vector<ad::Var> terms;
            for (std::size_t i = start; i < end; ++i) {
                const Graph& g = graphs[order[i]];
                ad::Var logits = model.apply(vars, tape.constant(g.adjacency()), g.features());
                Matrix target(1, classes);
                target(0, static_cast<std::size_t>(*g.graph_label())) = 1.0;
                terms.push_back(ad::loss(ad::Loss::softmax_cross_entropy, logits, target));
            }
            ad::Var loss = ad::mean_of(terms);
            check_finite(loss.value()(0, 0), epoch);
            tape.backward(loss);
            const auto grads = gradients_with_decay(tape, vars, model.parameters(), config.weight_decay);
            adam_step(model.mutable_parameters(), grads, adam, opt);
            epoch_loss += loss.value()(0, 0);
            ++batches;
        }
        TrainLogEntry entry{epoch, epoch_loss / static_cast<double>(batches), graph_accuracy(model, graphs, split.train),
                            graph_accuracy(model, graphs, split.validation)};
        result.log.push_back(entry);
        if (entry.validation_accuracy > result.best_validation_accuracy) {
            result.best_validation_accuracy = entry.validation_accuracy;
            result.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

TrainResult train(const data::Workload& w, const TrainConfig& config) {
    if (w.task == TaskKind::node) return train_node_model(w.graphs.front(), w.model_split, config);
    return train_graph_model(w.graphs, w.model_split, config);
}

std::string format_train_log(const std::vector<TrainLogEntry>& log) {
    std::ostringstream out;
    out << "epoch,loss,train_acc,val_acc\n";
    for (const auto& e : log) {
        out << e.epoch << ',' << text::exact(e.loss) << ',' << text::fixed(e.train_accuracy, 4) << ','
            << text::fixed(e.validation_accuracy, 4) << '\n';
    }
    return out.str();
}

} // namespace acx::gnn
