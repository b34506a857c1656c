#pragma once

#include <span>
#include <vector>

#include "mtlkd/nk/tape.hpp"

namespace mtlkd::nk {

// Additive mask value treated as minus infinity. Any mask entry at or below
// half of it marks the position as excluded.
inline constexpr Real kNegInf = Real(-1e30);
inline bool is_masked(Real m) { return m <= kNegInf / 2; }

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
// Elementwise sum; `b` may be a single row broadcast over the rows of `a`.
Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, Real s);
Var relu(Var a);
Var tanh(Var a);

Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_rows(Var a, std::size_t start, std::size_t count);
Var slice_cols(Var a, std::size_t start, std::size_t count);
// Output row r is input row idx[r]; repeats are allowed.
Var gather_rows(Var a, std::span<const int> idx);
// 1xL -> 1xM with out[m] = in[idx[m]], or `fill` where idx[m] < 0.
Var index_cols(Var a, std::span<const int> idx, Real fill);

// Row-wise softmax of logits + mask. `mask` is empty, one row (broadcast) or
// one row per logit row. Masked entries get probability exactly 0. Throws
// std::domain_error if a row has no unmasked entry.
Var masked_softmax(Var logits, const Tensor& mask);
// Row-wise log-softmax; masked entries are exactly -infinity and receive no
// gradient.
Var masked_log_softmax(Var logits, const Tensor& mask);

Var mean_rows(Var a);
Var sum(Var a);

struct PickEntry {
  std::size_t row;
  std::size_t col;
  Real weight;
};
// Scalar sum of weight * a(row, col).
Var weighted_pick(Var a, std::span<const PickEntry> entries);

// KL(p || q) = sum_i p_i (log p_i - log q_i) for a fixed target row-stochastic
// `p` and log-probabilities `log_q` of the same shape. Terms with p_i == 0
// contribute nothing. Returns a scalar summed over rows.
Var kl_div(const Tensor& p, Var log_q);

// Per-row layer normalisation with learned gain and bias (1xD each).
Var layer_norm(Var x, Var gamma, Var beta, Real eps = Real(1e-5));

// Scaled dot-product attention for `heads` heads and `groups` independent
// blocks of rows. Q has groups*Lq rows, K and V groups*Lk rows; attention
// never crosses a group. `mask` is empty, (groups x Lk) applied to every
// query of the group, or (groups*Lq x Lk). Scores are scaled by
// 1/sqrt(d_head).
Var attention(Var q, Var k, Var v, const Tensor& mask, int heads, int groups = 1);

// Q is (G x D), K is (G*L x D); out(g, l) = Q[g] . K[g*L + l].
Var group_dot(Var q, Var k);

}  // namespace mtlkd::nk
