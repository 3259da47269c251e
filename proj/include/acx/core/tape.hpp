#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "acx/core/matrix.hpp"

namespace acx::ad {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    Tape& tape() const { return *tape_; }
    std::size_t index() const noexcept { return index_; }
    bool valid() const noexcept { return tape_ != nullptr; }

private:
    friend class Tape;
    Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

    Tape* tape_ = nullptr;
    std::size_t index_ = 0;
};

/// Reverse-mode gradient tape.
///
/// Values are recorded in evaluation order. A node requires a gradient when
/// any of its inputs does; nodes built only from constants store no backward
/// closure, so a tape fed nothing but constants is an inference-only tape.
/// backward() walks the record in exact reverse order.
///
/// A tape is single-threaded. Separate tapes share nothing and may be used
/// from separate threads.
class Tape {
public:
    using Backward = std::function<void(Tape&, std::size_t self)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Matrix value);
    Var variable(Matrix value);

    const Matrix& value(std::size_t index) const { return nodes_[index].value; }
    const Matrix& value(Var v) const { return nodes_[v.index()].value; }
    bool requires_grad(std::size_t index) const { return nodes_[index].requires_grad; }
    bool requires_grad(Var v) const { return requires_grad(v.index()); }

    /// Gradient of the last backward() output with respect to v. Zero-filled
    /// when v did not influence the output.
    Matrix grad(Var v) const;

    /// Seeds d(out)/d(out) = 1 and propagates. out must be 1x1.
    void backward(Var out);

    /// Records an op result. The backward closure is dropped unless some input
    /// requires a gradient. Throws NumericalError on a non-finite value.
    Var record(Matrix value, std::initializer_list<Var> inputs, Backward backward);

    // For backward closures: add g into the adjoint of node `index` if it needs one.
    void accumulate(std::size_t index, const Matrix& g);
    const Matrix& adjoint(std::size_t index) const { return nodes_[index].grad; }

    std::size_t size() const noexcept { return nodes_.size(); }

    // Order in which the last backward() invoked closures; used by tests.
    const std::vector<std::size_t>& replay_order() const noexcept { return replay_order_; }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        Backward backward;
    };

    std::vector<Node> nodes_;
    std::vector<std::size_t> replay_order_;
};

} // namespace acx::ad
