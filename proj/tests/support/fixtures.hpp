#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "acx/core/matrix.hpp"
#include "acx/core/random.hpp"
#include "acx/core/tape.hpp"
#include "acx/gnn/model.hpp"
#include "acx/graph/graph.hpp"

namespace acx::testing {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0);

// Erdos-Renyi graph with one-hot random features.
Graph random_graph(std::size_t n, double p, Rng& rng, std::size_t feature_width = 3);
// Same, with a graph label (graph task) drawn from 0..classes-1.
Graph random_labelled_graph(std::size_t n, double p, Rng& rng, std::size_t feature_width, std::size_t classes);
// At most max_edges edges, node task, target node 0.
Graph random_small_node_graph(std::size_t n, std::size_t max_edges, Rng& rng, std::size_t feature_width = 3);

// f with random weights for the given task.
gnn::GnnModel random_model(TaskKind task, std::size_t input_width, std::size_t classes, std::uint64_t seed,
                           std::vector<std::size_t> hidden = {8, 8});

// One layer of width 1, identity weight, head [1, -1], zero biases:
// p(class 0 | node t) = sigmoid(2 relu(h_t)) with h the normalised feature sum.
gnn::GnnModel linear_node_model();

/// Central-difference check of d(scalar)/d(input) for every input entry.
/// `build` records the scalar from the given variables on a fresh tape.
/// Returns the largest error, each scaled by max(1, |analytic|, |numeric|).
double gradient_error(const std::vector<Matrix>& inputs,
                      const std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>& build,
                      double h = 1e-6);

/// Small molecules in TU layout. Atoms: 0 C, 1 N, 2 O, 3 Cl. A molecule is
/// labelled 1 exactly when some N has two O neighbours (a nitro group).
/// Negatives carry decoys: hydroxyl, amine and single N-O bonds.
std::vector<Graph> nitro_molecules(std::size_t count, std::uint64_t seed);
void write_nitro_tu(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                    const std::string& name = "NITRO");

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

} // namespace acx::testing
