#include "acx/core/tape.hpp"

#include "acx/core/error.hpp"

namespace acx::ad {

const Matrix& Var::value() const { return tape_->value(*this); }

Var Tape::constant(Matrix value) {
    if (!value.all_finite()) throw NumericalError("tape: non-finite constant " + value.shape_string());
    nodes_.push_back(Node{std::move(value), {}, false, {}});
    return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Matrix value) {
    if (!value.all_finite()) throw NumericalError("tape: non-finite variable " + value.shape_string());
    nodes_.push_back(Node{std::move(value), {}, true, {}});
    return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
    if (!value.all_finite()) {
        throw NumericalError("tape: operation produced non-finite values (" + value.shape_string() + ")");
    }
    bool needs = false;
    for (const Var& v : inputs) {
        if (v.tape_ != this) throw UsageError("tape: operand recorded on a different tape");
        needs = needs || nodes_[v.index()].requires_grad;
    }
    nodes_.push_back(Node{std::move(value), {}, needs, needs ? std::move(backward) : Backward{}});
    return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(std::size_t index, const Matrix& g) {
    Node& n = nodes_[index];
    if (!n.requires_grad) return;
    if (n.grad.empty() && !n.value.empty()) {
        n.grad = g;
        return;
    }
    require_same_shape(n.grad, g, "tape adjoint");
    auto dst = n.grad.data();
    auto src = g.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Matrix Tape::grad(Var v) const {
    const Node& n = nodes_[v.index()];
    if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
    return n.grad;
}

void Tape::backward(Var out) {
    if (out.tape_ != this) throw UsageError("tape: backward on a foreign variable");
    const Node& o = nodes_[out.index()];
    if (o.value.rows() != 1 || o.value.cols() != 1) {
        throw DimensionError("backward: output must be 1x1, got " + o.value.shape_string());
    }
    for (auto& n : nodes_) n.grad = Matrix();
    replay_order_.clear();
    if (!o.requires_grad) return;
    nodes_[out.index()].grad = Matrix(1, 1, 1.0);
    for (std::size_t i = out.index() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.backward || n.grad.empty()) continue;
        replay_order_.push_back(i);
        n.backward(*this, i);
    }
}

} // namespace acx::ad
