#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "acx/explainer/networks.hpp"
#include "acx/gnn/model.hpp"

namespace acx::explainer {

/// One supervised example: a graph, its ground-truth mask and the label f
/// predicts for it. f_row caches f's probability row on the unmasked graph.
struct Sample {
    std::shared_ptr<const Graph> graph;
    WeightedMask truth;
    int label = 0;
    std::vector<double> f_row;
};

Sample make_sample(const gnn::GnnModel& f, std::shared_ptr<const Graph> graph, WeightedMask truth);

struct DiscriminatorLoss {
    ad::Var source;  // -E[log D(real)] - E[log(1 - D(fake))]
    ad::Var classes; // -E[log P(l | real)] - E[log P(l | fake)]
    ad::Var total;
};

struct GeneratorLoss {
    ad::Var adversarial; // -E[log D(fake)]
    ad::Var classes;     // -E[log P(l | fake)]
    ad::Var fidelity;    // E ||f(G) - f(G ⊙ M)||²
    ad::Var total;       // adversarial + classes + lambda * fidelity
};

/// Both take discriminator outputs already on one tape; batches are averaged.
DiscriminatorLoss discriminator_loss(std::span<const Discriminator::Output> real,
                                     std::span<const Discriminator::Output> fake, std::span<const int> labels);

// The unregularised generator objective: adversarial + class terms only.
ad::Var base_generator_loss(std::span<const Discriminator::Output> fake, std::span<const int> labels);

/// Discriminator objective on a batch. `fake_masks` are fixed generator outputs.
DiscriminatorLoss loss_discriminator(ad::Tape& tape, const Discriminator& d, std::span<const ad::Var> d_params,
                                     std::span<const Sample> batch, std::span<const WeightedMask> fake_masks);

/// Generator objective on a batch, differentiable through the frozen f and D
/// into g_params. f's weights enter the tape as constants.
GeneratorLoss loss_generator(ad::Tape& tape, const Generator& g, std::span<const ad::Var> g_params,
                             const Discriminator& d, std::span<const ad::Var> d_params, const gnn::GnnModel& f,
                             std::span<const Sample> batch, double lambda);

struct ExplainerTrainConfig {
    double lambda = 2.0;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double generator_lr = 1e-3;
    double discriminator_lr = 1e-3;
    std::uint64_t seed = 0;
    // Specs whose mean validation ACC_exp picks the generator snapshot.
    std::vector<SubgraphSpec> validation_grid;
    // Called after every epoch with the loss entry, the validation ACC_exp and the current generator.
    std::function<void(const struct LossEntry&, double, const Generator&)> on_epoch;
};

struct LossEntry {
    std::size_t epoch = 0;
    double l_s = 0.0;
    double l_l = 0.0;
    double l_d = 0.0;
    double l_g = 0.0;
    double l_fid = 0.0;

    friend bool operator==(const LossEntry&, const LossEntry&) = default;
};

struct TrainedExplainer {
    Generator generator; // best validation snapshot
    Discriminator discriminator;
    std::vector<LossEntry> report;
    std::size_t best_epoch = 0;
    double best_validation_acc = -1.0;
};

/// Alternating updates per minibatch: discriminator first, then generator.
/// Throws NumericalError naming epoch and batch when a loss stops being finite.
TrainedExplainer train_acgan(const gnn::GnnModel& f, std::span<const Sample> train,
                             std::span<const std::shared_ptr<const Graph>> validation,
                             const ExplainerTrainConfig& config);

/// Uses f's predicted label, the generator's mask and the selector. Inference only.
Explanation explain(const Generator& g, const gnn::GnnModel& f, std::shared_ptr<const Graph> graph,
                    const SubgraphSpec& spec);

// 2.0 for the synthetic benchmarks, 4.5 for NCI1, 4.0 otherwise.
double default_lambda(const std::string& dataset);

// CSV: epoch,L_S,L_L,L_D,L_G,L_Fid
std::string format_loss_report(std::span<const LossEntry> report);
std::vector<LossEntry> parse_loss_report(std::string_view text);

} // namespace acx::explainer
