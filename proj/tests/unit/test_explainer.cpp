#include <cmath>

#include "doctest.h"

#include "acx/core/error.hpp"
#include "acx/core/text.hpp"
#include "acx/explainer/acgan.hpp"
#include "acx/gnn/layers.hpp"
#include "acx/gnn/train.hpp"
#include "acx/granger/granger.hpp"
#include "fixtures.hpp"

using namespace acx;
using namespace acx::explainer;
using V = std::vector<ad::Var>;

namespace {

struct Toy {
    gnn::GnnModel f;
    std::vector<Sample> samples;
    std::vector<std::shared_ptr<const Graph>> validation;
};

Toy toy(std::size_t count, std::uint64_t seed) {
    Toy t{acx::testing::random_model(TaskKind::node, 3, 2, seed), {}, {}};
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        auto g = std::make_shared<const Graph>(acx::testing::random_small_node_graph(6, 8, rng));
        t.samples.push_back(make_sample(t.f, g, granger::weight_all_edges(t.f, *g)));
        if (i % 3 == 0) t.validation.push_back(g);
    }
    return t;
}

Discriminator::Output constant_output(ad::Tape& tape, double p_real, std::size_t classes) {
    return {tape.constant(Matrix(1, 1, p_real)), tape.constant(Matrix(1, classes, 0.0))};
}

std::vector<Matrix> zeros_like(std::span<const Matrix> params) {
    std::vector<Matrix> out;
    for (const auto& p : params) out.emplace_back(p.rows(), p.cols(), 0.0);
    return out;
}

} // namespace

TEST_SUITE("acgan_explainer") {

TEST_CASE("zero-weight generator gives 0.5 on every edge") {
    auto base = Generator::initialize(3, 2, true, 1, {4, 4});
    Generator g(3, 2, true, {4, 4}, zeros_like(base.parameters()));
    Rng rng(2);
    auto graph = acx::testing::random_small_node_graph(6, 8, rng);
    for (const auto& [e, w] : g.mask(graph, 1).entries()) CHECK(w == 0.5);
}

TEST_CASE("mask support equals the edge set and is symmetric") {
    auto g = Generator::initialize(3, 3, true, 4, {8, 8});
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        auto graph = acx::testing::random_small_node_graph(3 + rng.index(8), 14, rng);
        const int label = static_cast<int>(rng.index(3));
        auto m = g.mask(graph, label);
        std::vector<Edge> support;
        for (const auto& [e, w] : m.entries()) {
            support.push_back(e);
            CHECK(w > 0.0);
            CHECK(w < 1.0);
        }
        CHECK(support == graph.edges());
        ad::Tape tape;
        const auto dense = g.apply(gnn::bind(tape, g.parameters(), false), graph, label).value();
        for (std::size_t i = 0; i < dense.rows(); ++i)
            for (std::size_t j = 0; j < dense.cols(); ++j) {
                CHECK(dense(i, j) == dense(j, i));
                if (graph.adjacency()(i, j) == 0.0) CHECK(dense(i, j) == 0.0);
            }
    }
    Rng r2(1);
    CHECK_THROWS_AS(g.mask(acx::testing::random_small_node_graph(4, 4, r2), 3), UsageError);
}

TEST_CASE("discriminator outputs are distributions") {
    auto d = Discriminator::initialize(4, 3, 5);
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        auto graph = acx::testing::random_small_node_graph(6, 9, rng);
        auto p = d.predict(graph.adjacency(), node_inputs(graph, true));
        CHECK(p.p_real > 0.0);
        CHECK(p.p_real < 1.0);
        double s = 0.0;
        for (double c : p.classes) s += c;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    Rng r2(1);
    auto graph = acx::testing::random_small_node_graph(4, 4, r2);
    CHECK_THROWS_AS(d.predict(graph.adjacency(), graph.features()), DimensionError);
}

TEST_CASE("discriminator loss closed forms") {
    for (std::size_t classes : {2u, 3u, 5u}) {
        ad::Tape tape;
        std::vector<Discriminator::Output> real, fake;
        std::vector<int> labels;
        for (int i = 0; i < 4; ++i) {
            real.push_back(constant_output(tape, 0.5, classes));
            fake.push_back(constant_output(tape, 0.5, classes));
            labels.push_back(i % static_cast<int>(classes));
        }
        auto l = discriminator_loss(real, fake, labels);
        CHECK(l.source.value()(0, 0) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));
        CHECK(l.classes.value()(0, 0) == doctest::Approx(2 * std::log(static_cast<double>(classes))).epsilon(1e-12));
        CHECK(l.total.value()(0, 0) == doctest::Approx(2 * std::log(2.0) + 2 * std::log(double(classes))).epsilon(1e-12));
        CHECK(base_generator_loss(fake, labels).value()(0, 0) ==
              doctest::Approx(std::log(2.0) + std::log(double(classes))).epsilon(1e-12));
    }
    ad::Tape tape;
    std::vector<Discriminator::Output> one{constant_output(tape, 0.5, 2)};
    std::vector<int> labels{0, 1};
    CHECK_THROWS(discriminator_loss(one, one, labels));
}

TEST_CASE("loss gradients match finite differences") {
    auto t = toy(3, 6);
    std::vector<Sample> batch(t.samples.begin(), t.samples.end());
    auto gen = Generator::initialize(3, 2, true, 7, {4, 4});
    auto disc = Discriminator::initialize(4, 2, 8, {4, 4});
    std::vector<WeightedMask> fake;
    for (const auto& s : batch) fake.push_back(gen.mask(*s.graph, s.label));

    const std::vector<Matrix> dp(disc.parameters().begin(), disc.parameters().end());
    CHECK(acx::testing::gradient_error(dp, [&](ad::Tape& tape, const V& v) {
        return loss_discriminator(tape, disc, v, batch, fake).total;
    }) < 1e-4);

    const std::vector<Matrix> gp(gen.parameters().begin(), gen.parameters().end());
    CHECK(acx::testing::gradient_error(gp, [&](ad::Tape& tape, const V& v) {
        const auto dv = gnn::bind(tape, disc.parameters(), false);
        return loss_generator(tape, gen, v, disc, dv, t.f, batch, 2.0).total;
    }) < 1e-4);
}

TEST_CASE("lambda = 0 reduces to the plain generator objective") {
    auto t = toy(4, 9);
    auto gen = Generator::initialize(3, 2, true, 10, {4, 4});
    auto disc = Discriminator::initialize(4, 2, 11, {4, 4});

    ad::Tape a;
    const auto ga = gnn::bind(a, gen.parameters(), true);
    auto l = loss_generator(a, gen, ga, disc, gnn::bind(a, disc.parameters(), false), t.f, t.samples, 0.0);
    a.backward(l.total);

    ad::Tape b;
    const auto gb = gnn::bind(b, gen.parameters(), true);
    const auto db = gnn::bind(b, disc.parameters(), false);
    std::vector<Discriminator::Output> fake;
    std::vector<int> labels;
    for (const auto& s : t.samples) {
        fake.push_back(disc.apply(db, gen.apply(gb, *s.graph, s.label), node_inputs(*s.graph, true)));
        labels.push_back(s.label);
    }
    auto plain = base_generator_loss(fake, labels);
    b.backward(plain);

    CHECK(l.total.value()(0, 0) == doctest::Approx(plain.value()(0, 0)).epsilon(1e-14));
    for (std::size_t i = 0; i < ga.size(); ++i) {
        const Matrix x = a.grad(ga[i]), y = b.grad(gb[i]);
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(x.data()[k] == doctest::Approx(y.data()[k]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(loss_generator(a, gen, ga, disc, gnn::bind(a, disc.parameters(), false), t.f, t.samples, -1.0),
                    UsageError);
}

TEST_CASE("identity mask has zero fidelity loss") {
    auto t = toy(4, 12);
    auto base = Generator::initialize(3, 2, true, 13, {4, 4});
    auto params = std::vector<Matrix>(base.parameters().begin(), base.parameters().end());
    params.back()(0, 0) = 60.0; // sigmoid saturates to exactly 1
    Generator gen(3, 2, true, {4, 4}, params);
    auto disc = Discriminator::initialize(4, 2, 14, {4, 4});
    ad::Tape tape;
    auto l = loss_generator(tape, gen, gnn::bind(tape, gen.parameters(), true), disc,
                            gnn::bind(tape, disc.parameters(), false), t.f, t.samples, 2.0);
    CHECK(l.fidelity.value()(0, 0) == 0.0);
    CHECK(l.total.value()(0, 0) == doctest::Approx(l.adversarial.value()(0, 0) + l.classes.value()(0, 0)));
}

TEST_CASE("training is deterministic and reports one entry per epoch") {
    auto t = toy(10, 15);
    ExplainerTrainConfig c;
    c.epochs = 4;
    c.batch_size = 4;
    c.seed = 3;
    c.validation_grid = {SubgraphSpec::top_k(3)};
    std::size_t calls = 0;
    c.on_epoch = [&](const LossEntry& e, double acc, const Generator&) {
        ++calls;
        CHECK(e.epoch == (calls - 1) % 4 + 1);
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
    };
    auto a = train_acgan(t.f, t.samples, t.validation, c);
    auto b = train_acgan(t.f, t.samples, t.validation, c);
    CHECK(calls == 8);
    c.on_epoch = nullptr;
    REQUIRE(a.report.size() == 4);
    CHECK(a.report == b.report);
    CHECK(a.generator.checksum() == b.generator.checksum());
    CHECK(a.discriminator.checksum() == b.discriminator.checksum());
    CHECK(a.best_epoch >= 1);
    CHECK(a.best_epoch <= 4);
    for (const auto& e : a.report) CHECK(e.l_d == doctest::Approx(e.l_s + e.l_l));
    c.seed = 4;
    CHECK(train_acgan(t.f, t.samples, t.validation, c).report != a.report);

    auto bad = c;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(train_acgan(t.f, t.samples, t.validation, bad), UsageError);
    CHECK_THROWS_AS(train_acgan(t.f, {}, t.validation, c), DataError);
}

TEST_CASE("loss report CSV round-trips") {
    std::vector<LossEntry> r{{1, 0.5, 0.25, 0.75, 1.5, 0.125}, {2, 1.0 / 3.0, 0.1, 0.2, 0.3, 0.0}};
    const auto s = format_loss_report(r);
    CHECK(s.rfind("epoch,L_S,L_L,L_D,L_G,L_Fid\n", 0) == 0);
    CHECK(parse_loss_report(s) == r);
    CHECK_THROWS(parse_loss_report("epoch,L_S\n1,2\n"));
}

TEST_CASE("generator and discriminator persistence") {
    auto gen = Generator::initialize(3, 2, true, 16);
    auto disc = Discriminator::initialize(4, 2, 17);
    const auto dir = acx::testing::scratch_dir("explainer");
    save_generator(dir / "g.gnn", gen, {{"snapshot", "abc"}});
    save_discriminator(dir / "d.gnn", disc);
    std::map<std::string, std::string> meta;
    auto g2 = load_generator(dir / "g.gnn", &meta);
    CHECK(g2.checksum() == gen.checksum());
    CHECK(g2.target_flag());
    CHECK(g2.hidden() == gen.hidden());
    CHECK(meta.at("snapshot") == "abc");
    CHECK(load_discriminator(dir / "d.gnn").checksum() == disc.checksum());
    CHECK(text::read_file(dir / "g.gnn").rfind("acx-gnn v1 gen ", 0) == 0);
    CHECK(text::read_file(dir / "d.gnn").rfind("acx-gnn v1 disc ", 0) == 0);
    CHECK_THROWS_AS(load_generator(dir / "d.gnn"), FormatError);
    CHECK_THROWS_AS(load_discriminator(dir / "g.gnn"), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("explain uses f's label and keeps selections inside the graph") {
    auto t = toy(20, 18);
    auto gen = Generator::initialize(3, 2, true, 19);
    for (const auto& s : t.samples) {
        auto e = explain(gen, t.f, s.graph, SubgraphSpec::top_k(3));
        CHECK(e.label_under_f == s.label);
        CHECK(e.explainer == "acgan");
        CHECK(e.selected_edges.size() == std::min<std::size_t>(3, s.graph->edge_count()));
        for (const auto& x : e.selected_edges) CHECK(s.graph->has_edge(x.u, x.v));
    }
}

TEST_CASE("default lambda per dataset") {
    CHECK(default_lambda("ba_shapes") == 2.0);
    CHECK(default_lambda("BA-Shapes") == 2.0);
    CHECK(default_lambda("tree_cycles") == 2.0);
    CHECK(default_lambda("NCI1") == 4.5);
    CHECK(default_lambda("Mutagenicity") == 4.0);
}

}
