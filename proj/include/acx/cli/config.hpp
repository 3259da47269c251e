#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "acx/core/error.hpp"
#include "acx/data/synthetic.hpp"
#include "acx/graph/mask.hpp"

namespace acx::cli {

// Bad config file, bad flag value, or artifacts from another snapshot.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A command ran before the one that produces its inputs.
class PrerequisiteError : public Error {
public:
    using Error::Error;
};

/// Every key of the config file. Optional fields left unset take a default
/// that depends on the dataset and are filled in by resolve().
struct RunConfig {
    std::string dataset = "ba_shapes"; // ba_shapes | tree_cycles | tu
    std::string tu_path;
    std::string tu_name;       // inferred from the *_A.txt file when empty
    std::size_t tu_subsample = 0; // 0 keeps every graph
    data::Scale scale = data::Scale::desk;
    std::uint64_t seed = 1;
    std::size_t hops = 3;

    std::optional<std::size_t> ba_base_nodes;
    std::optional<std::size_t> ba_motifs;
    std::optional<double> ba_random_edge_ratio;
    std::optional<std::size_t> ba_attachment;
    std::optional<std::size_t> tc_depth;
    std::optional<std::size_t> tc_motifs;

    std::size_t gnn_epochs = 1000;
    double gnn_lr = 0.005;
    double gnn_weight_decay = 5e-4;
    std::size_t gnn_batch_size = 32;
    std::optional<double> gnn_edge_dropout;

    std::optional<double> lambda;
    std::size_t explainer_epochs = 200;
    std::size_t explainer_batch_size = 32;
    double explainer_generator_lr = 1e-3;
    double explainer_discriminator_lr = 1e-3;

    std::vector<SubgraphSpec> specs; // empty: the dataset's default grid
    std::optional<SubgraphSpec> viz_selector;

    std::size_t jobs = 1;
    std::string out;
};

struct KeyInfo {
    std::string_view key;
    std::string_view help;
};
// The documented key list, in file order.
const std::vector<KeyInfo>& config_keys();

/// Parses `key = value` lines. '#' starts a comment; blank lines are skipped.
/// Unknown keys, duplicates and bad values throw ConfigError with
/// "<origin>:<line>". Does not apply dataset defaults.
RunConfig parse_config(std::string_view text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Fills the dataset-dependent defaults and checks cross-field constraints.
/// Throws ConfigError.
RunConfig resolve(RunConfig c);

// Canonical text of a resolved config: every key except jobs and out, sorted.
std::string snapshot_text(const RunConfig& c);
// Hex FNV-1a of snapshot_text.
std::string snapshot_hash(const RunConfig& c);

data::BaShapesParams ba_params(const RunConfig& c);
data::TreeCyclesParams tc_params(const RunConfig& c);

} // namespace acx::cli
