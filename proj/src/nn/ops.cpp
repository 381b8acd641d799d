#include "maser/nn/ops.hpp"

#include "maser/errors.hpp"

#include <cmath>
#include <string>

namespace maser::nn {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError(std::string(op) + ": shape mismatch " + shape(a.value()) + " vs " + shape(b.value()));
    }
}

} // namespace

Var matmul(const Var& a, const Var& b) {
    if (a.cols() != b.rows()) {
        throw ConfigError("matmul: inner dimension mismatch " + shape(a.value()) + " * " + shape(b.value()));
    }
    Matrix out = a.value() * b.value();
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().push(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.needs_grad(ia)) {
            t.accumulate(ia, g * t.value(ib).transpose());
        }
        if (t.needs_grad(ib)) {
            t.accumulate(ib, t.value(ia).transpose() * g);
        }
    });
}

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().push(a.value() + b.value(), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        t.accumulate(ia, t.grad(self));
        t.accumulate(ib, t.grad(self));
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a, b, "sub");
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    return a.tape().push(a.value() - b.value(), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        t.accumulate(ia, t.grad(self));
        t.accumulate(ib, -t.grad(self));
    });
}

Var mul(const Var& a, const Var& b) {
    require_same_shape(a, b, "mul");
    const std::size_t ia = a.id();
    const std::size_t ib = b.id();
    Matrix out = a.value().cwiseProduct(b.value());
    return a.tape().push(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.needs_grad(ia)) {
            t.accumulate(ia, g.cwiseProduct(t.value(ib)));
        }
        if (t.needs_grad(ib)) {
            t.accumulate(ib, g.cwiseProduct(t.value(ia)));
        }
    });
}

Var scale(const Var& a, double s) {
    const std::size_t ia = a.id();
    return a.tape().push(a.value() * s, {a}, [ia, s](Tape& t, std::size_t self) { t.accumulate(ia, t.grad(self) * s); });
}

Var add_scalar(const Var& a, double s) {
    const std::size_t ia = a.id();
    Matrix out = a.value().array() + s;
    return a.tape().push(std::move(out), {a}, [ia](Tape& t, std::size_t self) { t.accumulate(ia, t.grad(self)); });
}

Var add_row(const Var& x, const Var& row) {
    if (row.rows() != 1 || row.cols() != x.cols()) {
        throw ConfigError("add_row: expected 1x" + std::to_string(x.cols()) + " row, got " + shape(row.value()));
    }
    const std::size_t ix = x.id();
    const std::size_t ir = row.id();
    Matrix out = x.value().rowwise() + row.value().row(0);
    return x.tape().push(std::move(out), {x, row}, [ix, ir](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        t.accumulate(ix, g);
        if (t.needs_grad(ir)) {
            t.accumulate(ir, g.colwise().sum());
        }
    });
}

Var one_minus(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = 1.0 - x.value().array();
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) { t.accumulate(ix, -t.grad(self)); });
}

Var sigmoid(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = (1.0 + (-x.value().array()).exp()).inverse();
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        const auto y = t.value(self).array();
        t.accumulate(ix, (t.grad(self).array() * y * (1.0 - y)).matrix());
    });
}

Var tanh(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = x.value().array().tanh();
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        const auto y = t.value(self).array();
        t.accumulate(ix, (t.grad(self).array() * (1.0 - y * y)).matrix());
    });
}

Var relu(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = x.value().cwiseMax(0.0);
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        const auto in = t.value(ix).array();
        t.accumulate(ix, (in > 0.0).select(t.grad(self).array(), 0.0).matrix());
    });
}

Var elu(const Var& x) {
    const std::size_t ix = x.id();
    const auto in = x.value().array();
    Matrix out = (in > 0.0).select(in, in.exp() - 1.0);
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        const auto a = t.value(ix).array();
        const auto g = t.grad(self).array();
        t.accumulate(ix, (a > 0.0).select(g, g * a.exp()).matrix());
    });
}

Var abs(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = x.value().cwiseAbs();
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        const auto a = t.value(ix).array();
        const auto g = t.grad(self).array();
        t.accumulate(ix, (a > 0.0).select(g, (a < 0.0).select(-g, 0.0)).matrix());
    });
}

Var square(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = x.value().array().square();
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        t.accumulate(ix, (2.0 * t.grad(self).array() * t.value(ix).array()).matrix());
    });
}

Var row_sum(const Var& x) {
    const std::size_t ix = x.id();
    const Eigen::Index cols = x.cols();
    Matrix out = x.value().rowwise().sum();
    return x.tape().push(std::move(out), {x}, [ix, cols](Tape& t, std::size_t self) {
        t.accumulate(ix, t.grad(self).replicate(1, cols));
    });
}

Var sum(const Var& x) {
    const std::size_t ix = x.id();
    const Eigen::Index r = x.rows();
    const Eigen::Index c = x.cols();
    Matrix out(1, 1);
    out(0, 0) = x.value().sum();
    return x.tape().push(std::move(out), {x}, [ix, r, c](Tape& t, std::size_t self) {
        t.accumulate(ix, Matrix::Constant(r, c, t.grad(self)(0, 0)));
    });
}

Var row_norm(const Var& x) {
    const std::size_t ix = x.id();
    Matrix out = x.value().rowwise().norm();
    return x.tape().push(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
        const Matrix& in = t.value(ix);
        const Matrix& n = t.value(self);
        const Matrix& g = t.grad(self);
        Matrix d = Matrix::Zero(in.rows(), in.cols());
        for (Eigen::Index r = 0; r < in.rows(); ++r) {
            if (n(r, 0) > 0.0) {
                d.row(r) = in.row(r) * (g(r, 0) / n(r, 0));
            }
        }
        t.accumulate(ix, d);
    });
}

Var kl_to_uniform_rows(const Var& logits) {
    const std::size_t ix = logits.id();
    const Matrix& z = logits.value();
    const double log_k = std::log(static_cast<double>(z.cols()));
    Matrix probs(z.rows(), z.cols());
    Matrix log_probs(z.rows(), z.cols());
    Matrix out(z.rows(), 1);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double zmax = z.row(r).maxCoeff();
        const double lse = zmax + std::log((z.row(r).array() - zmax).exp().sum());
        log_probs.row(r) = z.row(r).array() - lse;
        probs.row(r) = log_probs.row(r).array().exp();
        out(r, 0) = (probs.row(r).array() * log_probs.row(r).array()).sum() + log_k;
    }
    return logits.tape().push(std::move(out), {logits},
                              [ix, probs = std::move(probs), log_probs = std::move(log_probs)](Tape& t, std::size_t self) {
                                  // d/dz_j sum_k p_k log p_k = p_j (log p_j - sum_k p_k log p_k)
                                  const Matrix& g = t.grad(self);
                                  Matrix d(probs.rows(), probs.cols());
                                  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
                                      const double neg_entropy = (probs.row(r).array() * log_probs.row(r).array()).sum();
                                      d.row(r) = g(r, 0) * probs.row(r).array() * (log_probs.row(r).array() - neg_entropy);
                                  }
                                  t.accumulate(ix, d);
                              });
}

Var rows(const Var& x, Eigen::Index start, Eigen::Index count) {
    if (start < 0 || count < 0 || start + count > x.rows()) {
        throw ConfigError("rows: range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                          ") outside " + shape(x.value()));
    }
    const std::size_t ix = x.id();
    Matrix out = x.value().middleRows(start, count);
    return x.tape().push(std::move(out), {x}, [ix, start](Tape& t, std::size_t self) {
        t.accumulate_block(ix, start, 0, t.grad(self));
    });
}

Var cols(const Var& x, Eigen::Index start, Eigen::Index count) {
    if (start < 0 || count < 0 || start + count > x.cols()) {
        throw ConfigError("cols: range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                          ") outside " + shape(x.value()));
    }
    const std::size_t ix = x.id();
    Matrix out = x.value().middleCols(start, count);
    return x.tape().push(std::move(out), {x}, [ix, start](Tape& t, std::size_t self) {
        t.accumulate_block(ix, 0, start, t.grad(self));
    });
}

Var vstack(std::span<const Var> parts) {
    if (parts.empty()) {
        throw ConfigError("vstack: no inputs");
    }
    Tape& tape = parts.front().tape();
    const Eigen::Index cols = parts.front().cols();
    Eigen::Index total = 0;
    for (const Var& p : parts) {
        if (p.cols() != cols) {
            throw ConfigError("vstack: column mismatch");
        }
        total += p.rows();
    }
    Matrix out(total, cols);
    std::vector<std::size_t> ids;
    std::vector<Eigen::Index> offsets;
    Eigen::Index at = 0;
    for (const Var& p : parts) {
        out.middleRows(at, p.rows()) = p.value();
        ids.push_back(p.id());
        offsets.push_back(at);
        at += p.rows();
    }
    return tape.push(std::move(out), parts,
                     [ids = std::move(ids), offsets = std::move(offsets)](Tape& t, std::size_t self) {
                         const Matrix& g = t.grad(self);
                         for (std::size_t k = 0; k < ids.size(); ++k) {
                             const Eigen::Index n = t.value(ids[k]).rows();
                             if (t.needs_grad(ids[k])) {
                                 t.accumulate(ids[k], g.middleRows(offsets[k], n));
                             }
                         }
                     });
}

Var hstack(std::span<const Var> parts) {
    if (parts.empty()) {
        throw ConfigError("hstack: no inputs");
    }
    Tape& tape = parts.front().tape();
    const Eigen::Index rows_n = parts.front().rows();
    Eigen::Index total = 0;
    for (const Var& p : parts) {
        if (p.rows() != rows_n) {
            throw ConfigError("hstack: row mismatch");
        }
        total += p.cols();
    }
    Matrix out(rows_n, total);
    std::vector<std::size_t> ids;
    std::vector<Eigen::Index> offsets;
    Eigen::Index at = 0;
    for (const Var& p : parts) {
        out.middleCols(at, p.cols()) = p.value();
        ids.push_back(p.id());
        offsets.push_back(at);
        at += p.cols();
    }
    return tape.push(std::move(out), parts,
                     [ids = std::move(ids), offsets = std::move(offsets)](Tape& t, std::size_t self) {
                         const Matrix& g = t.grad(self);
                         for (std::size_t k = 0; k < ids.size(); ++k) {
                             const Eigen::Index n = t.value(ids[k]).cols();
                             if (t.needs_grad(ids[k])) {
                                 t.accumulate(ids[k], g.middleCols(offsets[k], n));
                             }
                         }
                     });
}

Var gather_rows(const Var& x, std::span<const int> index) {
    const std::size_t ix = x.id();
    const Eigen::Index r = x.rows();
    const Eigen::Index c = x.cols();
    std::vector<int> idx(index.begin(), index.end());
    Matrix out(static_cast<Eigen::Index>(idx.size()), c);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= r) {
            throw ConfigError("gather_rows: row " + std::to_string(idx[k]) + " out of range");
        }
        out.row(static_cast<Eigen::Index>(k)) = x.value().row(idx[k]);
    }
    return x.tape().push(std::move(out), {x}, [ix, r, c, idx = std::move(idx)](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        Matrix d = Matrix::Zero(r, c);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            d.row(idx[k]) += g.row(static_cast<Eigen::Index>(k));
        }
        t.accumulate(ix, d);
    });
}

Var pick(const Var& x, std::span<const int> index) {
    if (static_cast<Eigen::Index>(index.size()) != x.rows()) {
        throw ConfigError("pick: " + std::to_string(index.size()) + " indices for " + std::to_string(x.rows()) + " rows");
    }
    const std::size_t ix = x.id();
    const Eigen::Index c = x.cols();
    std::vector<int> idx(index.begin(), index.end());
    Matrix out(x.rows(), 1);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        if (idx[r] < 0 || idx[r] >= c) {
            throw ConfigError("pick: index " + std::to_string(idx[r]) + " out of range");
        }
        out(r, 0) = x.value()(r, idx[r]);
    }
    return x.tape().push(std::move(out), {x}, [ix, c, idx = std::move(idx)](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        Matrix d = Matrix::Zero(g.rows(), c);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            d(r, idx[r]) = g(r, 0);
        }
        t.accumulate(ix, d);
    });
}

Var batched_row_matmul(const Var& q, const Var& w, Eigen::Index m) {
    const Eigen::Index b = q.rows();
    const Eigen::Index n = q.cols();
    if (w.rows() != b || w.cols() != n * m) {
        throw ConfigError("batched_row_matmul: expected " + std::to_string(b) + "x" + std::to_string(n * m) +
                          " weights, got " + shape(w.value()));
    }
    Matrix out = Matrix::Zero(b, m);
    const Matrix& qv = q.value();
    const Matrix& wv = w.value();
    for (Eigen::Index r = 0; r < b; ++r) {
        for (Eigen::Index i = 0; i < n; ++i) {
            out.row(r) += qv(r, i) * wv.block(r, i * m, 1, m);
        }
    }
    const std::size_t iq = q.id();
    const std::size_t iw = w.id();
    return q.tape().push(std::move(out), {q, w}, [iq, iw, b, n, m](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.needs_grad(iq)) {
            const Matrix& wv = t.value(iw);
            Matrix dq(b, n);
            for (Eigen::Index r = 0; r < b; ++r) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    dq(r, i) = wv.row(r).segment(i * m, m).dot(g.row(r));
                }
            }
            t.accumulate(iq, dq);
        }
        if (t.needs_grad(iw)) {
            const Matrix& qv = t.value(iq);
            Matrix dw(b, n * m);
            for (Eigen::Index r = 0; r < b; ++r) {
                for (Eigen::Index i = 0; i < n; ++i) {
                    dw.block(r, i * m, 1, m) = qv(r, i) * g.row(r);
                }
            }
            t.accumulate(iw, dw);
        }
    });
}

} // namespace maser::nn
