#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace maser::nn {

/// Row-major dense matrix; every parameter array is stored and serialized in this layout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// A named learnable array together with its gradient accumulator.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    Parameter() = default;
    Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

    void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while its tape lives.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
    double scalar() const;

    Tape& tape() const { return *tape_; }
    std::size_t id() const { return id_; }
    bool valid() const { return tape_ != nullptr; }

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Reverse-mode differentiation tape over dense matrices.
///
/// Every op appends a node holding its forward value and, when any input
/// requires a gradient, a closure that pushes the node's gradient back to its
/// inputs. `backward()` walks the nodes in reverse and finally adds leaf
/// gradients into the bound `Parameter::grad` arrays. An inference tape keeps
/// only forward values.
class Tape {
public:
    enum class Mode { kRecord, kInference };
    using BackwardFn = std::function<void(Tape&, std::size_t self)>;

    explicit Tape(Mode mode = Mode::kRecord) : mode_(mode) { nodes_.reserve(256); }
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const { return mode_ == Mode::kRecord; }
    std::size_t size() const { return nodes_.size(); }

    Var constant(Matrix value);
    /// Leaf bound to `p`; gradients flow into `p.grad` on backward(). Repeated
    /// calls for the same parameter return the same leaf.
    Var parameter(Parameter& p);

    /// Seeds d(loss)/d(loss) = 1 and accumulates into bound parameters.
    /// Throws ConfigError unless `loss` is 1x1.
    void backward(const Var& loss);

    // Op-author interface.
    Var push(Matrix value, std::span<const Var> inputs, BackwardFn fn);
    Var push(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
        return push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
    }
    const Matrix& value(std::size_t id) const { return nodes_[id].value; }
    bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
    const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }

    template <typename Derived>
    void accumulate(std::size_t id, const Eigen::MatrixBase<Derived>& g) {
        Node& node = nodes_[id];
        if (!node.needs_grad) {
            return;
        }
        if (node.has_grad) {
            node.grad += g;
        } else {
            node.grad = g;
            node.has_grad = true;
        }
    }

    /// Adds `g` into the block of the node's gradient starting at (r0, c0).
    template <typename Derived>
    void accumulate_block(std::size_t id, Eigen::Index r0, Eigen::Index c0, const Eigen::MatrixBase<Derived>& g) {
        Node& node = nodes_[id];
        if (!node.needs_grad) {
            return;
        }
        if (!node.has_grad) {
            node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
            node.has_grad = true;
        }
        node.grad.block(r0, c0, g.rows(), g.cols()) += g;
    }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        BackwardFn backward;
        Parameter* param = nullptr;
        bool needs_grad = false;
        bool has_grad = false;
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, std::size_t> leaves_;
    Mode mode_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

} // namespace maser::nn
