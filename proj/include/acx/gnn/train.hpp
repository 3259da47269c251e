#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "acx/data/split.hpp"
#include "acx/data/workload.hpp"
#include "acx/gnn/model.hpp"

namespace acx::gnn {

struct TrainConfig {
    std::size_t epochs = 1000;
    double lr = 0.005;
    double weight_decay = 5e-4;
    std::uint64_t seed = 0;
    std::size_t batch_size = 32; // graph tasks only
    // Probability of dropping each edge in a node-task training epoch.
    double edge_dropout = 0.0;
};

struct TrainLogEntry {
    std::size_t epoch = 0;
    double loss = 0.0;
    double train_accuracy = 0.0;
    double validation_accuracy = 0.0;
};

struct TrainResult {
    GnnModel model;               // best-validation snapshot
    std::vector<TrainLogEntry> log;
    std::size_t best_epoch = 0;
    double best_validation_accuracy = 0.0;
};

/// Full-batch training on the nodes of one graph; split ids are node ids.
TrainResult train_node_model(const Graph& g, const data::SplitIndex& split, const TrainConfig& config);

/// Minibatch training over graphs; split ids index `graphs`.
TrainResult train_graph_model(const std::vector<Graph>& graphs, const data::SplitIndex& split,
                              const TrainConfig& config);

/// Dispatches on the workload's task kind. Throws NumericalError naming the
/// epoch when the loss stops being finite.
TrainResult train(const data::Workload& w, const TrainConfig& config);

// Accuracy of f on nodes `ids` of g (node task) or on graphs[ids] (graph task).
double node_accuracy(const GnnModel& model, const Graph& g, const std::vector<std::size_t>& ids);
double graph_accuracy(const GnnModel& model, const std::vector<Graph>& graphs, const std::vector<std::size_t>& ids);

std::string format_train_log(const std::vector<TrainLogEntry>& log);

} // namespace acx::gnn
