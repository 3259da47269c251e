#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "acx/core/matrix.hpp"
#include "acx/core/ops.hpp"
#include "acx/graph/graph.hpp"

namespace acx::gnn {

struct Architecture {
    TaskKind task = TaskKind::node;
    std::size_t input_width = 0;
    std::vector<std::size_t> hidden; // one width per message-passing layer
    std::size_t classes = 0;

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

// Three layers, width 32 for node tasks and 64 for graph tasks.
Architecture default_architecture(TaskKind task, std::size_t input_width, std::size_t classes);

/// The target classifier f: graph convolutions with symmetric normalisation
/// and self loops, ReLU after every layer, mean pooling for graph tasks, and a
/// linear softmax head.
///
/// Parameter layout: W_0, b_0, ..., W_{L-1}, b_{L-1}, W_head, b_head.
class GnnModel {
public:
    GnnModel() = default;
    // Throws DimensionError when params do not match the architecture.
    GnnModel(Architecture arch, std::vector<Matrix> params);

    static GnnModel initialize(Architecture arch, std::uint64_t seed);

    const Architecture& architecture() const noexcept { return arch_; }
    std::span<const Matrix> parameters() const noexcept { return params_; }
    std::span<Matrix> mutable_parameters() noexcept { return params_; }
    std::uint64_t checksum() const;

    /// Class logits on a tape. adjacency may be fractional and may require a
    /// gradient. `param_vars`, when given, receives the bound parameters.
    /// Output: n x classes for node tasks, 1 x classes for graph tasks.
    ad::Var logits(ad::Tape& tape, ad::Var adjacency, const Matrix& features, bool trainable = false,
                   std::vector<ad::Var>* param_vars = nullptr) const;
    ad::Var probabilities(ad::Tape& tape, ad::Var adjacency, const Matrix& features) const;

    // Same as logits() with parameters already bound on the tape (see gnn::bind).
    ad::Var apply(std::span<const ad::Var> params, ad::Var adjacency, const Matrix& features) const;

private:
    Architecture arch_;
    std::vector<Matrix> params_;
};

/// Row-stochastic class probabilities, n x classes (node) or 1 x classes (graph).
Matrix forward(const GnnModel& model, const WeightedGraph& g);
Matrix forward(const GnnModel& model, const Graph& g);

struct Prediction {
    int label = 0;
    std::vector<double> probabilities;
};

/// Argmax of forward, lowest class on ties. Node tasks read target_node and
/// throw UsageError without one.
Prediction predict_label(const GnnModel& model, const WeightedGraph& g);
Prediction predict_label(const GnnModel& model, const Graph& g);

// Picks the relevant probability row (target row for node tasks).
std::vector<double> prediction_row(const GnnModel& model, const Matrix& probs, std::optional<std::size_t> target);
int argmax(std::span<const double> p);

void save_model(const std::filesystem::path& path, const GnnModel& model,
                const std::map<std::string, std::string>& meta = {});
GnnModel load_model(const std::filesystem::path& path, std::map<std::string, std::string>* meta = nullptr);
std::string format_model(const GnnModel& model, const std::map<std::string, std::string>& meta = {});
GnnModel parse_model(std::string_view text, std::map<std::string, std::string>* meta = nullptr);

} // namespace acx::gnn
