#include <cmath>

#include "doctest.h"

#include "acx/core/adam.hpp"
#include "acx/core/error.hpp"
#include "acx/core/kernels.hpp"
#include "acx/core/ops.hpp"
#include "fixtures.hpp"

using namespace acx;
using acx::testing::gradient_error;
using acx::testing::random_matrix;

TEST_SUITE("numeric_core") {

TEST_CASE("matrix invariants") {
    Matrix m(2, 3, 1.5);
    CHECK(m.size() == 6);
    CHECK(m.all_finite());
    m(1, 2) = std::nan("");
    CHECK_FALSE(m.all_finite());
    CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
    CHECK(Matrix({{1, 2}, {3, 4}}).transposed() == Matrix({{1, 3}, {2, 4}}));
}

TEST_CASE("matmul hand cases") {
    ad::Tape t;
    Rng rng(3);
    const Matrix m = random_matrix(3, 4, rng);
    CHECK(ad::matmul(t.constant(Matrix::identity(3)), t.constant(m)).value() == m);
    CHECK(ad::matmul(t.constant({{1, 2}, {3, 4}}), t.constant({{0}, {1}})).value() == Matrix({{2}, {4}}));
    CHECK_THROWS_AS(ad::matmul(t.constant(Matrix(2, 3)), t.constant(Matrix(2, 3))), DimensionError);
}

TEST_CASE("gemm variants agree bit for bit") {
    Rng rng(11);
    for (auto [n, k, m] : {std::tuple{5, 7, 3}, {64, 96, 80}, {300, 200, 150}, {1, 1, 1}}) {
        const Matrix a = random_matrix(n, k, rng), b = random_matrix(k, m, rng);
        const Matrix serial = kernels::gemm_serial(a, b);
        CHECK(kernels::gemm(a, b) == serial);
        const Matrix naive = kernels::gemm_naive(a, b);
        double worst = 0.0;
        for (std::size_t i = 0; i < serial.size(); ++i) worst = std::max(worst, std::abs(serial.data()[i] - naive.data()[i]));
        CHECK(worst < 1e-12);
        CHECK(kernels::gemm(a.transposed(), b, kernels::Trans::yes) == serial);
        CHECK(kernels::gemm(a, b.transposed(), kernels::Trans::no, kernels::Trans::yes) == serial);
    }
}

TEST_CASE("elementwise closed forms") {
    ad::Tape t;
    CHECK(ad::sigmoid(t.constant(Matrix(1, 1, 0.0))).value()(0, 0) == 0.5);
    Rng rng(4);
    const Matrix m = random_matrix(3, 3, rng);
    CHECK(ad::elementwise(ad::Elementwise::multiply, t.constant(m), t.constant(Matrix(3, 3, 1.0))).value() == m);

    ad::Tape g;
    auto x = g.variable({{-1.0, 2.0}});
    g.backward(ad::sum(ad::relu(x)));
    CHECK(g.grad(x) == Matrix({{0.0, 1.0}}));
}

TEST_CASE("losses closed forms") {
    ad::Tape t;
    Rng rng(5);
    const Matrix p = random_matrix(4, 3, rng);
    CHECK(ad::loss(ad::Loss::mse, t.constant(p), p).value()(0, 0) == 0.0);
    CHECK(ad::loss(ad::Loss::binary_cross_entropy, t.constant(Matrix(1, 1, 0.5)), Matrix(1, 1, 1.0)).value()(0, 0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // clamping keeps saturated probabilities finite
    CHECK(std::isfinite(ad::loss(ad::Loss::binary_cross_entropy, t.constant(Matrix(1, 1, 0.0)), Matrix(1, 1, 1.0))
                            .value()(0, 0)));
    CHECK(ad::loss(ad::Loss::softmax_cross_entropy, t.constant(Matrix(1, 4, 0.0)), Matrix({{0, 1, 0, 0}}))
              .value()(0, 0) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("finite differences: every primitive") {
    Rng rng(7);
    using V = std::vector<ad::Var>;
    const auto a = random_matrix(5, 7, rng), b = random_matrix(7, 3, rng), c = random_matrix(5, 7, rng);
    const auto sq = random_matrix(4, 4, rng, 0.1, 1.0);
    const auto row = random_matrix(1, 7, rng);
    auto s = [](ad::Var v) { return ad::sum(v); };
    // a fixed weighting makes every output entry matter differently
    const auto w57 = random_matrix(5, 7, rng);
    auto ws = [&](ad::Var v) { return ad::sum(ad::multiply(v, v.tape().constant(w57))); };

    CHECK(gradient_error({a, b}, [&](ad::Tape&, const V& v) { return s(ad::matmul(v[0], v[1])); }) < 1e-5);
    CHECK(gradient_error({a, c}, [&](ad::Tape&, const V& v) { return ws(ad::add(v[0], v[1])); }) < 1e-5);
    CHECK(gradient_error({a, c}, [&](ad::Tape&, const V& v) { return ws(ad::sub(v[0], v[1])); }) < 1e-5);
    CHECK(gradient_error({a, c}, [&](ad::Tape&, const V& v) { return ws(ad::multiply(v[0], v[1])); }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape&, const V& v) { return ws(ad::scale(v[0], -2.5)); }) < 1e-5);
    CHECK(gradient_error({a, row}, [&](ad::Tape&, const V& v) { return ws(ad::add_row(v[0], v[1])); }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape&, const V& v) { return ws(ad::relu(v[0])); }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape&, const V& v) { return ws(ad::sigmoid(v[0])); }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape& t, const V& v) {
              return ad::sum(ad::multiply(ad::transpose(v[0]), t.constant(w57.transposed())));
          }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape&, const V& v) { return ws(ad::softmax_rows(v[0])); }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape& t, const V& v) {
              return ad::sum(ad::multiply(ad::mean_rows(v[0]), t.constant(row)));
          }) < 1e-5);
    CHECK(gradient_error({a}, [&](ad::Tape& t, const V& v) {
              return ad::sum(ad::multiply(ad::pick_row(v[0], 2), t.constant(row)));
          }) < 1e-5);
    const auto w514 = random_matrix(5, 14, rng);
    CHECK(gradient_error({a, c}, [&](ad::Tape& t, const V& v) {
              return ad::sum(ad::multiply(ad::concat_cols(v[0], v[1]), t.constant(w514)));
          }) < 1e-5);
    CHECK(gradient_error({sq}, [&](ad::Tape& t, const V& v) {
              return ad::sum(ad::multiply(ad::symmetrize(v[0]), t.constant(Matrix({{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 1, 2, 3}, {4, 5, 6, 7}}))));
          }) < 1e-5);
    CHECK(gradient_error({sq}, [&](ad::Tape& t, const V& v) {
              return ad::sum(ad::multiply(ad::gcn_normalize(v[0]), t.constant(Matrix({{1, 2, 3, 4}, {5, 6, 7, 8}, {9, 1, 2, 3}, {4, 5, 6, 7}}))));
          }) < 1e-5);
}

TEST_CASE("finite differences: losses") {
    Rng rng(9);
    using V = std::vector<ad::Var>;
    const auto logits = random_matrix(6, 4, rng, -2, 2);
    Matrix target(6, 4);
    for (std::size_t i = 0; i < 6; ++i) target(i, rng.index(4)) = 1.0;
    CHECK(gradient_error({logits}, [&](ad::Tape&, const V& v) {
              return ad::loss(ad::Loss::softmax_cross_entropy, v[0], target);
          }) < 1e-5);
    const auto probs = random_matrix(6, 1, rng, 0.05, 0.95);
    Matrix bits(6, 1);
    for (std::size_t i = 0; i < 6; i += 2) bits(i, 0) = 1.0;
    CHECK(gradient_error({probs}, [&](ad::Tape&, const V& v) {
              return ad::loss(ad::Loss::binary_cross_entropy, v[0], bits);
          }) < 1e-5);
    const auto other = random_matrix(6, 4, rng);
    CHECK(gradient_error({logits}, [&](ad::Tape&, const V& v) { return ad::loss(ad::Loss::mse, v[0], other); }) <
          1e-5);
}

TEST_CASE("tape replays in exact reverse order and keeps shapes") {
    ad::Tape t;
    Rng rng(2);
    auto x = t.variable(random_matrix(3, 4, rng));
    auto w = t.variable(random_matrix(4, 2, rng));
    auto h = ad::relu(ad::matmul(x, w));
    auto y = ad::sum(ad::sigmoid(h));
    t.backward(y);
    const auto& order = t.replay_order();
    REQUIRE(order.size() == 4);
    CHECK(std::is_sorted(order.rbegin(), order.rend()));
    CHECK(t.grad(x).rows() == 3);
    CHECK(t.grad(x).cols() == 4);
    CHECK(t.grad(w).rows() == 4);
}

TEST_CASE("non-finite values are rejected at record time") {
    ad::Tape t;
    auto x = t.variable(Matrix(1, 1, 1e308));
    CHECK_THROWS_AS(ad::scale(x, 10.0), NumericalError);
}

TEST_CASE("constant-only tape stores no gradient work") {
    ad::Tape t;
    auto a = t.constant(Matrix(2, 2, 1.0));
    auto b = ad::matmul(a, a);
    CHECK_FALSE(t.requires_grad(b));
}

TEST_CASE("adam") {
    SUBCASE("zero gradient leaves parameters") {
        std::vector<Matrix> p{Matrix({{1.0, -2.0}})};
        std::vector<Matrix> g{Matrix(1, 2)};
        AdamState s;
        adam_step(p, g, s);
        CHECK(p[0] == Matrix({{1.0, -2.0}}));
        CHECK(s.step == 1);
    }
    SUBCASE("first step moves by lr against the gradient sign") {
        std::vector<Matrix> p{Matrix({{0.0, 0.0}})};
        std::vector<Matrix> g{Matrix({{3.0, -0.2}})};
        AdamState s;
        adam_step(p, g, s, {.lr = 0.01});
        CHECK(p[0](0, 0) == doctest::Approx(-0.01).epsilon(1e-6));
        CHECK(p[0](0, 1) == doctest::Approx(0.01).epsilon(1e-6));
    }
    SUBCASE("ten steps on w^2 shrink |w| monotonically") {
        std::vector<Matrix> p{Matrix(1, 1, 1.0)};
        AdamState s;
        double last = 1.0;
        for (int i = 0; i < 10; ++i) {
            std::vector<Matrix> g{Matrix(1, 1, 2.0 * p[0](0, 0))};
            adam_step(p, g, s, {.lr = 0.05});
            CHECK(std::abs(p[0](0, 0)) < last);
            last = std::abs(p[0](0, 0));
        }
    }
    SUBCASE("shape mismatch") {
        std::vector<Matrix> p{Matrix(1, 2)};
        std::vector<Matrix> g{Matrix(2, 1)};
        AdamState s;
        CHECK_THROWS_AS(adam_step(p, g, s), DimensionError);
    }
}

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

}
