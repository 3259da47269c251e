#include "acx/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acx/core/error.hpp"
#include "acx/core/kernels.hpp"

namespace acx::ad {
namespace {

using kernels::gemm;
using kernels::Trans;

template <class F>
Matrix map(const Matrix& a, F f) {
    Matrix out(a.rows(), a.cols());
    auto src = a.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
    return out;
}

template <class F>
Matrix zip(const Matrix& a, const Matrix& b, F f) {
    Matrix out(a.rows(), a.cols());
    auto x = a.data();
    auto y = b.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < x.size(); ++i) dst[i] = f(x[i], y[i]);
    return out;
}

Matrix scaled(const Matrix& a, double s) {
    return map(a, [s](double x) { return x * s; });
}

double clamp_prob(double p) { return std::clamp(p, kLogEps, 1.0 - kLogEps); }

void require_scalar(Var v, const char* what) {
    if (v.rows() != 1 || v.cols() != 1) {
        throw DimensionError(std::string(what) + ": expected 1x1, got " + v.value().shape_string());
    }
}

} // namespace

Var matmul(Var a, Var b) {
    Matrix out = gemm(a.value(), b.value());
    const std::size_t ia = a.index(), ib = b.index();
    return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        if (t.requires_grad(ia)) t.accumulate(ia, gemm(g, t.value(ib), Trans::no, Trans::yes));
        if (t.requires_grad(ib)) t.accumulate(ib, gemm(t.value(ia), g, Trans::yes, Trans::no));
    });
}

Var add(Var a, Var b) {
    require_same_shape(a.value(), b.value(), "add");
    Matrix out = zip(a.value(), b.value(), [](double x, double y) { return x + y; });
    const std::size_t ia = a.index(), ib = b.index();
    return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        t.accumulate(ia, t.adjoint(self));
        t.accumulate(ib, t.adjoint(self));
    });
}

Var sub(Var a, Var b) {
    require_same_shape(a.value(), b.value(), "sub");
    Matrix out = zip(a.value(), b.value(), [](double x, double y) { return x - y; });
    const std::size_t ia = a.index(), ib = b.index();
    return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        t.accumulate(ia, t.adjoint(self));
        t.accumulate(ib, scaled(t.adjoint(self), -1.0));
    });
}

Var multiply(Var a, Var b) {
    require_same_shape(a.value(), b.value(), "multiply");
    Matrix out = zip(a.value(), b.value(), [](double x, double y) { return x * y; });
    const std::size_t ia = a.index(), ib = b.index();
    return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        if (t.requires_grad(ia)) t.accumulate(ia, zip(g, t.value(ib), [](double x, double y) { return x * y; }));
        if (t.requires_grad(ib)) t.accumulate(ib, zip(g, t.value(ia), [](double x, double y) { return x * y; }));
    });
}

Var scale(Var a, double s) {
    const std::size_t ia = a.index();
    return a.tape().record(scaled(a.value(), s), {a},
                           [ia, s](Tape& t, std::size_t self) { t.accumulate(ia, scaled(t.adjoint(self), s)); });
}

Var add_row(Var a, Var bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        throw DimensionError("add_row: bias " + bias.value().shape_string() + " does not fit " +
                             a.value().shape_string());
    }
    Matrix out = a.value();
    const auto b = bias.value().data();
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
    }
    const std::size_t ia = a.index(), ib = bias.index();
    return a.tape().record(std::move(out), {a, bias}, [ia, ib](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        t.accumulate(ia, g);
        if (t.requires_grad(ib)) {
            Matrix gb(1, g.cols());
            for (std::size_t r = 0; r < g.rows(); ++r)
                for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
            t.accumulate(ib, gb);
        }
    });
}

Var relu(Var a) {
    Matrix out = map(a.value(), [](double x) { return x > 0.0 ? x : 0.0; });
    const std::size_t ia = a.index();
    return a.tape().record(std::move(out), {a}, [ia](Tape& t, std::size_t self) {
        t.accumulate(ia, zip(t.adjoint(self), t.value(ia), [](double g, double x) { return x > 0.0 ? g : 0.0; }));
    });
}

Var sigmoid(Var a) {
    Matrix out = map(a.value(), [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
    });
    const std::size_t ia = a.index();
    return a.tape().record(std::move(out), {a}, [ia](Tape& t, std::size_t self) {
        const Matrix& y = t.value(self);
        t.accumulate(ia, zip(t.adjoint(self), y, [](double g, double s) { return g * s * (1.0 - s); }));
    });
}

Var transpose(Var a) {
    const std::size_t ia = a.index();
    return a.tape().record(a.value().transposed(), {a},
                           [ia](Tape& t, std::size_t self) { t.accumulate(ia, t.adjoint(self).transposed()); });
}

Var softmax_rows(Var a) {
    const Matrix& x = a.value();
    Matrix y(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto in = x.row(r);
        auto out = y.row(r);
        const double mx = *std::max_element(in.begin(), in.end());
        double z = 0.0;
        for (std::size_t c = 0; c < in.size(); ++c) z += (out[c] = std::exp(in[c] - mx));
        for (double& v : out) v /= z;
    }
    const std::size_t ia = a.index();
    return a.tape().record(std::move(y), {a}, [ia](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        const Matrix& p = t.value(self);
        Matrix dx(p.rows(), p.cols());
        for (std::size_t r = 0; r < p.rows(); ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < p.cols(); ++c) dot += g(r, c) * p(r, c);
            for (std::size_t c = 0; c < p.cols(); ++c) dx(r, c) = p(r, c) * (g(r, c) - dot);
        }
        t.accumulate(ia, dx);
    });
}

Var mean_rows(Var a) {
    const Matrix& x = a.value();
    Matrix out(1, x.cols());
    const double inv = x.rows() == 0 ? 0.0 : 1.0 / static_cast<double>(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
    for (double& v : out.data()) v *= inv;
    const std::size_t ia = a.index();
    const std::size_t n = x.rows();
    return a.tape().record(std::move(out), {a}, [ia, n, inv](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        Matrix dx(n, g.cols());
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < g.cols(); ++c) dx(r, c) = g(0, c) * inv;
        t.accumulate(ia, dx);
    });
}

Var pick_row(Var a, std::size_t r) {
    const Matrix& x = a.value();
    if (r >= x.rows()) {
        throw DimensionError("pick_row: row " + std::to_string(r) + " out of " + x.shape_string());
    }
    Matrix out(1, x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) = x(r, c);
    const std::size_t ia = a.index(), rows = x.rows();
    return a.tape().record(std::move(out), {a}, [ia, r, rows](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        Matrix dx(rows, g.cols());
        for (std::size_t c = 0; c < g.cols(); ++c) dx(r, c) = g(0, c);
        t.accumulate(ia, dx);
    });
}

Var sum(Var a) {
    double s = 0.0;
    for (double v : a.value().data()) s += v;
    const std::size_t ia = a.index(), rows = a.rows(), cols = a.cols();
    return a.tape().record(Matrix(1, 1, s), {a}, [ia, rows, cols](Tape& t, std::size_t self) {
        t.accumulate(ia, Matrix(rows, cols, t.adjoint(self)(0, 0)));
    });
}

Var concat_cols(Var a, Var b) {
    if (a.rows() != b.rows()) {
        throw DimensionError("concat_cols: row counts differ, " + a.value().shape_string() + " vs " +
                             b.value().shape_string());
    }
    const std::size_t ca = a.cols(), cb = b.cols(), rows = a.rows();
    Matrix out(rows, ca + cb);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < ca; ++c) out(r, c) = a.value()(r, c);
        for (std::size_t c = 0; c < cb; ++c) out(r, ca + c) = b.value()(r, c);
    }
    const std::size_t ia = a.index(), ib = b.index();
    return a.tape().record(std::move(out), {a, b}, [=](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        if (t.requires_grad(ia)) {
            Matrix ga(rows, ca);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < ca; ++c) ga(r, c) = g(r, c);
            t.accumulate(ia, ga);
        }
        if (t.requires_grad(ib)) {
            Matrix gb(rows, cb);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cb; ++c) gb(r, c) = g(r, ca + c);
            t.accumulate(ib, gb);
        }
    });
}

Var symmetrize(Var a) {
    const Matrix& x = a.value();
    if (x.rows() != x.cols()) throw DimensionError("symmetrize: not square, " + x.shape_string());
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = 0.5 * (x(i, j) + x(j, i));
    const std::size_t ia = a.index();
    return a.tape().record(std::move(out), {a}, [ia](Tape& t, std::size_t self) {
        const Matrix& g = t.adjoint(self);
        Matrix dx(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) dx(i, j) = 0.5 * (g(i, j) + g(j, i));
        t.accumulate(ia, dx);
    });
}

Var gcn_normalize(Var adjacency) {
    const Matrix& a = adjacency.value();
    if (a.rows() != a.cols()) throw DimensionError("gcn_normalize: adjacency not square, " + a.shape_string());
    const std::size_t n = a.rows();
    std::vector<double> deg(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) deg[i] += a(i, j);
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(deg[i] > 0.0)) throw NumericalError("gcn_normalize: non-positive degree at node " + std::to_string(i));
        inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = a(i, j) + (i == j ? 1.0 : 0.0);
            if (v != 0.0) out(i, j) = v * inv_sqrt[i] * inv_sqrt[j];
        }
    const std::size_t ia = adjacency.index();
    return adjacency.tape().record(
        std::move(out), {adjacency}, [ia, deg = std::move(deg), inv_sqrt = std::move(inv_sqrt)](Tape& t, std::size_t self) {
            const Matrix& g = t.adjoint(self);
            const Matrix& y = t.value(self);
            const std::size_t n = g.rows();
            // d(loss)/d(degree_i), through both the row and the column scaling.
            std::vector<double> ddeg(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double gy = g(i, j) * y(i, j);
                    ddeg[i] += gy;
                    ddeg[j] += gy;
                }
            for (std::size_t i = 0; i < n; ++i) ddeg[i] *= -0.5 / deg[i];
            Matrix da(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) da(i, j) = g(i, j) * inv_sqrt[i] * inv_sqrt[j] + ddeg[i];
            t.accumulate(ia, da);
        });
}

Var elementwise(Elementwise op, Var a) {
    switch (op) {
    case Elementwise::relu: return relu(a);
    case Elementwise::sigmoid: return sigmoid(a);
    default: throw UsageError("elementwise: binary op needs two operands");
    }
}

Var elementwise(Elementwise op, Var a, Var b) {
    switch (op) {
    case Elementwise::multiply: return multiply(a, b);
    case Elementwise::add: return add(a, b);
    default: throw UsageError("elementwise: unary op given two operands");
    }
}

Var loss(Loss kind, Var pred, const Matrix& target) {
    const Matrix& p = pred.value();
    require_same_shape(p, target, "loss");
    const std::size_t n = p.rows();
    if (n == 0) throw DimensionError("loss: empty prediction");
    const double inv_n = 1.0 / static_cast<double>(n);
    const std::size_t ip = pred.index();
    Tape& tape = pred.tape();

    switch (kind) {
    case Loss::softmax_cross_entropy: {
        Matrix prob(p.rows(), p.cols());
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            auto in = p.row(r);
            const double mx = *std::max_element(in.begin(), in.end());
            double z = 0.0;
            for (std::size_t c = 0; c < in.size(); ++c) z += (prob(r, c) = std::exp(in[c] - mx));
            for (std::size_t c = 0; c < in.size(); ++c) {
                prob(r, c) /= z;
                if (target(r, c) != 0.0) total -= target(r, c) * std::log(std::max(prob(r, c), kLogEps));
            }
        }
        return tape.record(Matrix(1, 1, total * inv_n), {pred},
                           [ip, inv_n, prob = std::move(prob), target](Tape& t, std::size_t self) {
                               const double g = t.adjoint(self)(0, 0);
                               Matrix dx(prob.rows(), prob.cols());
                               for (std::size_t r = 0; r < prob.rows(); ++r) {
                                   double mass = 0.0;
                                   for (std::size_t c = 0; c < prob.cols(); ++c) mass += target(r, c);
                                   for (std::size_t c = 0; c < prob.cols(); ++c)
                                       dx(r, c) = g * inv_n * (prob(r, c) * mass - target(r, c));
                               }
                               t.accumulate(ip, dx);
                           });
    }
    case Loss::binary_cross_entropy: {
        double total = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double q = clamp_prob(p.data()[i]);
            const double y = target.data()[i];
            total -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
        }
        return tape.record(Matrix(1, 1, total * inv_n), {pred}, [ip, inv_n, target](Tape& t, std::size_t self) {
            const double g = t.adjoint(self)(0, 0);
            const Matrix& p = t.value(ip);
            Matrix dx = zip(p, target, [g, inv_n](double x, double y) {
                const double q = clamp_prob(x);
                return g * inv_n * (-y / q + (1.0 - y) / (1.0 - q));
            });
            t.accumulate(ip, dx);
        });
    }
    case Loss::mse: {
        double total = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = p.data()[i] - target.data()[i];
            total += d * d;
        }
        return tape.record(Matrix(1, 1, total * inv_n), {pred}, [ip, inv_n, target](Tape& t, std::size_t self) {
            const double g = t.adjoint(self)(0, 0);
            t.accumulate(ip, zip(t.value(ip), target, [g, inv_n](double x, double y) { return 2.0 * g * inv_n * (x - y); }));
        });
    }
    }
    throw UsageError("loss: unknown kind");
}

Var mean_of(std::span<const Var> scalars) {
    if (scalars.empty()) throw UsageError("mean_of: no terms");
    Var acc = scalars[0];
    require_scalar(acc, "mean_of");
    for (std::size_t i = 1; i < scalars.size(); ++i) {
        require_scalar(scalars[i], "mean_of");
        acc = add(acc, scalars[i]);
    }
    return scale(acc, 1.0 / static_cast<double>(scalars.size()));
}

} // namespace acx::ad
