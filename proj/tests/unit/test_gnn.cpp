#include <cmath>
#include <numeric>

#include "doctest.h"

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"
#include "acx/gnn/train.hpp"
#include "fixtures.hpp"

using namespace acx;
using acx::testing::random_graph;
using acx::testing::random_labelled_graph;
using acx::testing::random_model;

namespace {

Graph permute(const Graph& g, const std::vector<std::size_t>& perm) {
    // node i of g becomes perm[i]
    const std::size_t n = g.node_count();
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) edges.push_back(Edge::make(perm[e.u], perm[e.v]));
    std::sort(edges.begin(), edges.end());
    Matrix x(n, g.features().cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) x(perm[i], j) = g.features()(i, j);
    if (g.task() == TaskKind::graph) return Graph::from_edges(n, edges, x, std::nullopt, *g.graph_label());
    return Graph::from_edges(n, edges, x, std::vector<int>(n, 0), std::nullopt);
}

} // namespace

TEST_SUITE("target_gnn") {

TEST_CASE("forward rows are distributions") {
    Rng rng(1);
    auto f = random_model(TaskKind::node, 3, 4, 7);
    for (int t = 0; t < 10; ++t) {
        auto p = gnn::forward(f, random_graph(9, 0.3, rng));
        for (std::size_t i = 0; i < p.rows(); ++i) {
            const auto r = p.row(i);
            CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("edgeless graph: each node sees only its own features") {
    Rng rng(2);
    auto f = random_model(TaskKind::node, 3, 2, 8);
    auto g = random_graph(6, 0.0, rng);
    auto p = gnn::forward(f, g);
    for (std::size_t i = 0; i < 6; ++i) {
        Matrix x(1, 3);
        for (std::size_t j = 0; j < 3; ++j) x(0, j) = g.features()(i, j);
        auto alone = gnn::forward(f, Graph(Matrix(1, 1), x, std::vector<int>{0}, std::nullopt));
        CHECK(alone(0, 0) == doctest::Approx(p(i, 0)).epsilon(1e-12));
    }
}

TEST_CASE("permutation equivariance and invariance") {
    Rng rng(3);
    auto fn = random_model(TaskKind::node, 3, 3, 9);
    auto fg = random_model(TaskKind::graph, 3, 2, 10);
    for (int t = 0; t < 20; ++t) {
        std::vector<std::size_t> perm(8);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        auto g = random_graph(8, 0.35, rng);
        auto p = gnn::forward(fn, g), q = gnn::forward(fn, permute(g, perm));
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t c = 0; c < 3; ++c) CHECK(q(perm[i], c) == doctest::Approx(p(i, c)).epsilon(1e-10));

        auto h = random_labelled_graph(8, 0.35, rng, 3, 2);
        auto a = gnn::forward(fg, h), b = gnn::forward(fg, permute(h, perm));
        CHECK(a(0, 0) == doctest::Approx(b(0, 0)).epsilon(1e-10));
        CHECK(gnn::predict_label(fg, h).label == gnn::predict_label(fg, permute(h, perm)).label);
    }
}

TEST_CASE("predict_label") {
    Rng rng(4);
    auto f = random_model(TaskKind::graph, 3, 3, 11);
    for (int t = 0; t < 100; ++t) {
        auto g = random_labelled_graph(3 + rng.index(8), 0.3, rng, 3, 3);
        auto p = gnn::forward(f, g);
        auto pred = gnn::predict_label(f, g);
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (p(0, c) > p(0, best)) best = c;
        CHECK(pred.label == best);
    }
    // zeroed weights give uniform output, ties go to class 0
    auto zero = f;
    for (auto& m : zero.mutable_parameters()) m.fill(0.0);
    CHECK(gnn::predict_label(zero, random_labelled_graph(5, 0.5, rng, 3, 3)).label == 0);
    CHECK(gnn::argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
    // node tasks need a target
    auto fn = random_model(TaskKind::node, 3, 2, 12);
    CHECK_THROWS_AS(gnn::predict_label(fn, random_graph(4, 0.5, rng)), UsageError);
}

TEST_CASE("training smoke and determinism") {
    Rng rng(5);
    std::vector<Graph> two{random_labelled_graph(5, 0.5, rng, 3, 2), random_labelled_graph(6, 0.5, rng, 3, 2)};
    data::SplitIndex split{{0, 1}, {0}, {1}};
    gnn::TrainConfig c;
    c.epochs = 1;
    c.seed = 3;
    auto r = gnn::train_graph_model(two, split, c);
    REQUIRE(r.log.size() == 1);
    CHECK(std::isfinite(r.log[0].loss));

    std::vector<Graph> many;
    for (int i = 0; i < 30; ++i) many.push_back(random_labelled_graph(6, 0.4, rng, 3, 2));
    auto s = data::split(many.size(), 1);
    c.epochs = 20;
    auto a = gnn::train_graph_model(many, s, c), b = gnn::train_graph_model(many, s, c);
    CHECK(a.model.checksum() == b.model.checksum());
    CHECK(a.log.size() == b.log.size());

    gnn::TrainConfig bad;
    bad.edge_dropout = 1.0;
    CHECK_THROWS_AS(gnn::train_graph_model(many, s, bad), UsageError);
}

TEST_CASE("node training learns a separable toy task") {
    // two cliques joined by one edge; label = clique, features constant
    std::vector<Edge> e;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = i + 1; j < 10; ++j) e.push_back({i, j});
    for (std::size_t i = 10; i < 14; ++i) e.push_back({i - 1 == 9 ? 0 : i - 1, i});
    std::vector<int> labels(14, 0);
    for (std::size_t i = 10; i < 14; ++i) labels[i] = 1;
    auto g = Graph::from_edges(14, e, Matrix(14, 1, 1.0), labels, std::nullopt);
    data::SplitIndex s;
    for (std::size_t i = 0; i < 14; ++i) (i % 4 == 3 ? s.test : s.train).push_back(i);
    s.validation = s.train;
    gnn::TrainConfig c;
    c.epochs = 300;
    c.seed = 1;
    auto r = gnn::train_node_model(g, s, c);
    CHECK(r.log.back().loss < r.log.front().loss);
    CHECK(gnn::node_accuracy(r.model, g, s.train) > 0.9);
}

TEST_CASE("model persistence") {
    auto f = random_model(TaskKind::node, 10, 4, 13, {32, 32, 32});
    const auto text = gnn::format_model(f, {{"snapshot", "x1"}});
    CHECK(text.rfind("acx-gnn v1 node 3 10,32,32,32 4\n", 0) == 0);
    std::map<std::string, std::string> meta;
    auto back = gnn::parse_model(text, &meta);
    CHECK(meta.at("snapshot") == "x1");
    CHECK(back.checksum() == f.checksum());
    Rng rng(6);
    auto g = random_graph(12, 0.3, rng, 10).with_target(0);
    CHECK(gnn::forward(back, g) == gnn::forward(f, g));

    CHECK_THROWS_AS(gnn::parse_model(text.substr(0, text.size() / 2)), FormatError);
    CHECK_THROWS_AS(gnn::parse_model("acx-gnn v2" + text.substr(10)), VersionError);
    CHECK_THROWS_AS(gnn::parse_model("hello\n"), FormatError);
    auto corrupt = text;
    corrupt[corrupt.size() - 3] = 'x';
    CHECK_THROWS_AS(gnn::parse_model(corrupt), FormatError);

    const auto dir = acx::testing::scratch_dir("model");
    gnn::save_model(dir / "m.gnn", f);
    CHECK(gnn::load_model(dir / "m.gnn").checksum() == f.checksum());
    std::filesystem::remove_all(dir);
}

TEST_CASE("architecture checks") {
    gnn::Architecture arch{TaskKind::node, 3, {4}, 2};
    CHECK_THROWS_AS(gnn::GnnModel(arch, {}), DimensionError);
    auto f = gnn::GnnModel::initialize(arch, 1);
    Rng rng(7);
    CHECK_THROWS(gnn::forward(f, random_graph(5, 0.3, rng, 4).with_target(0)));
}

}
