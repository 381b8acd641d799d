#include "maser/nn/tape.hpp"

#include "maser/errors.hpp"

namespace maser::nn {

double Var::scalar() const {
    const Matrix& v = value();
    if (v.rows() != 1 || v.cols() != 1) {
        throw ConfigError("scalar() on a " + std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + " value");
    }
    return v(0, 0);
}

Var Tape::constant(Matrix value) {
    Node node;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& p) {
    if (const auto it = leaves_.find(&p); it != leaves_.end()) {
        return Var(this, it->second);
    }
    leaves_.emplace(&p, nodes_.size());
    Node node;
    node.value = p.value;
    if (recording()) {
        node.param = &p;
        node.needs_grad = true;
    }
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Tape::push(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
    Node node;
    node.value = std::move(value);
    if (recording()) {
        for (const Var& in : inputs) {
            if (in.tape_ != this) {
                throw UsageError("op inputs recorded on a different tape");
            }
            node.needs_grad = node.needs_grad || nodes_[in.id_].needs_grad;
        }
        if (node.needs_grad) {
            node.backward = std::move(fn);
        }
    }
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

void Tape::backward(const Var& loss) {
    if (!recording()) {
        throw UsageError("backward() on an inference tape");
    }
    if (loss.tape_ != this) {
        throw UsageError("loss recorded on a different tape");
    }
    const Matrix& v = nodes_[loss.id_].value;
    if (v.rows() != 1 || v.cols() != 1) {
        throw ConfigError("backward() needs a scalar loss, got " + std::to_string(v.rows()) + "x" +
                          std::to_string(v.cols()));
    }
    accumulate(loss.id_, Matrix::Ones(1, 1));
    for (std::size_t id = loss.id_ + 1; id-- > 0;) {
        Node& node = nodes_[id];
        if (!node.has_grad) {
            continue;
        }
        if (node.backward) {
            node.backward(*this, id);
        }
        if (node.param != nullptr) {
            node.param->grad += node.grad;
        }
    }
}

} // namespace maser::nn
