#pragma once

#include "maser/nn/tape.hpp"

#include <span>
#include <vector>

// Differentiable matrix ops. All inputs must live on the same tape.
namespace maser::nn {

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
/// Elementwise product.
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
/// x (B x k) plus a 1 x k row broadcast over every row.
Var add_row(const Var& x, const Var& row);
/// 1 - x
Var one_minus(const Var& x);

Var sigmoid(const Var& x);
Var tanh(const Var& x);
Var relu(const Var& x);
Var elu(const Var& x);
Var abs(const Var& x);
Var square(const Var& x);

/// B x k -> B x 1
Var row_sum(const Var& x);
/// Any shape -> 1 x 1
Var sum(const Var& x);
/// Euclidean norm of each row, B x k -> B x 1. The subgradient at a zero row is 0.
Var row_norm(const Var& x);
/// KL(softmax(row) || uniform) for each row, B x k -> B x 1.
Var kl_to_uniform_rows(const Var& logits);

Var rows(const Var& x, Eigen::Index start, Eigen::Index count);
Var cols(const Var& x, Eigen::Index start, Eigen::Index count);
Var vstack(std::span<const Var> parts);
Var hstack(std::span<const Var> parts);
/// out.row(r) = x.row(index[r]); gradients scatter-add back.
Var gather_rows(const Var& x, std::span<const int> index);
/// out(b) = x(b, index[b]); B x k -> B x 1
Var pick(const Var& x, std::span<const int> index);

/// Per-row vector-matrix product used by hypernetwork mixers:
/// q is B x n, w is B x (n*m) holding a row-major n x m matrix per row; result is B x m.
Var batched_row_matmul(const Var& q, const Var& w, Eigen::Index m);

} // namespace maser::nn
