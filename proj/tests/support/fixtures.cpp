#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <unistd.h>

#include "acx/data/tu.hpp"

namespace acx::testing {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo, double hi) {
    Matrix m(rows, cols);
    for (auto& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

namespace {

Matrix one_hot_features(std::size_t n, std::size_t width, Rng& rng) {
    Matrix x(n, width);
    for (std::size_t i = 0; i < n; ++i) x(i, rng.index(width)) = 1.0;
    return x;
}

std::vector<Edge> random_edges(std::size_t n, double p, Rng& rng) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) e.push_back({i, j});
    return e;
}

} // namespace

Graph random_graph(std::size_t n, double p, Rng& rng, std::size_t feature_width) {
    auto edges = random_edges(n, p, rng);
    std::vector<int> labels(n, 0);
    return Graph::from_edges(n, edges, one_hot_features(n, feature_width, rng), labels, std::nullopt);
}

Graph random_labelled_graph(std::size_t n, double p, Rng& rng, std::size_t feature_width, std::size_t classes) {
    auto edges = random_edges(n, p, rng);
    auto x = one_hot_features(n, feature_width, rng);
    return Graph::from_edges(n, edges, std::move(x), std::nullopt, static_cast<int>(rng.index(classes)));
}

Graph random_small_node_graph(std::size_t n, std::size_t max_edges, Rng& rng, std::size_t feature_width) {
    std::vector<Edge> all;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) all.push_back({i, j});
    rng.shuffle(all);
    all.resize(std::min(all.size(), 1 + rng.index(max_edges)));
    std::sort(all.begin(), all.end());
    std::vector<int> labels(n, 0);
    return Graph::from_edges(n, all, one_hot_features(n, feature_width, rng), labels, std::nullopt, 0);
}

gnn::GnnModel random_model(TaskKind task, std::size_t input_width, std::size_t classes, std::uint64_t seed,
                           std::vector<std::size_t> hidden) {
    gnn::Architecture arch{task, input_width, std::move(hidden), classes};
    return gnn::GnnModel::initialize(arch, seed);
}

gnn::GnnModel linear_node_model() {
    gnn::Architecture arch{TaskKind::node, 1, {1}, 2};
    return gnn::GnnModel(arch, {Matrix({{1.0}}), Matrix({{0.0}}), Matrix({{1.0, -1.0}}), Matrix({{0.0, 0.0}})});
}

double gradient_error(const std::vector<Matrix>& inputs,
                      const std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>& build, double h) {
    std::vector<Matrix> analytic;
    {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (const auto& m : inputs) vars.push_back(tape.variable(m));
        auto out = build(tape, vars);
        tape.backward(out);
        for (const auto& v : vars) analytic.push_back(tape.grad(v));
    }
    auto eval = [&](const std::vector<Matrix>& in) {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (const auto& m : in) vars.push_back(tape.constant(m));
        return build(tape, vars).value()(0, 0);
    };
    double worst = 0.0;
    auto work = inputs;
    for (std::size_t k = 0; k < work.size(); ++k) {
        for (std::size_t i = 0; i < work[k].size(); ++i) {
            const double saved = work[k].data()[i];
            work[k].data()[i] = saved + h;
            const double up = eval(work);
            work[k].data()[i] = saved - h;
            const double down = eval(work);
            work[k].data()[i] = saved;
            const double numeric = (up - down) / (2 * h);
            const double a = analytic[k].data()[i];
            const double denom = std::max({1.0, std::abs(a), std::abs(numeric)});
            worst = std::max(worst, std::abs(a - numeric) / denom);
        }
    }
    return worst;
}

std::vector<Graph> nitro_molecules(std::size_t count, std::uint64_t seed) {
    enum Atom { C = 0, N = 1, O = 2, Cl = 3 };
    Rng rng(seed);
    std::vector<Graph> out;
    out.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
        std::vector<int> atoms;
        std::vector<Edge> edges;
        auto add = [&](int a, std::optional<std::size_t> to) {
            atoms.push_back(a);
            if (to) edges.push_back(Edge::make(*to, atoms.size() - 1));
            return atoms.size() - 1;
        };
        // carbon backbone: a random tree plus a ring closure or two
        const std::size_t carbons = 6 + rng.index(12);
        add(C, std::nullopt);
        for (std::size_t i = 1; i < carbons; ++i) add(C, rng.index(i));
        for (std::size_t r = rng.index(3); r > 0; --r) {
            const auto a = rng.index(carbons), b = rng.index(carbons);
            const auto e = Edge::make(a, b);
            if (a != b && std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
        }
        const bool nitro = rng.uniform() < 0.5;
        if (nitro) {
            const auto n = add(N, rng.index(carbons));
            add(O, n);
            add(O, n);
        }
        for (std::size_t d = rng.index(4); d > 0; --d) {
            switch (rng.index(4)) {
            case 0: add(O, rng.index(carbons)); break; // hydroxyl
            case 1: add(N, rng.index(carbons)); break; // amine
            case 2: {                                  // N-O
                const auto n = add(N, rng.index(carbons));
                add(O, n);
                break;
            }
            default: add(Cl, rng.index(carbons)); break;
            }
        }
        const std::size_t n = atoms.size();
        Matrix x(n, 4);
        for (std::size_t i = 0; i < n; ++i) x(i, static_cast<std::size_t>(atoms[i])) = 1.0;
        std::vector<std::size_t> oxygen_neighbours(n, 0);
        for (const auto& e : edges) {
            if (atoms[e.u] == N && atoms[e.v] == O) ++oxygen_neighbours[e.u];
            if (atoms[e.v] == N && atoms[e.u] == O) ++oxygen_neighbours[e.v];
        }
        bool label = false;
        for (std::size_t i = 0; i < n; ++i) label = label || (atoms[i] == N && oxygen_neighbours[i] >= 2);
        std::sort(edges.begin(), edges.end());
        out.push_back(Graph::from_edges(n, edges, std::move(x), std::nullopt, label ? 1 : 0));
    }
    return out;
}

void write_nitro_tu(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed, const std::string& name) {
    std::filesystem::create_directories(dir);
    data::save_tu_dataset(dir, name, nitro_molecules(count, seed));
}

std::filesystem::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("acx-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace acx::testing
