#pragma once

#include <string>

#include "mtlkd/core/rng.hpp"
#include "mtlkd/nk/ops.hpp"
#include "mtlkd/nk/tape.hpp"

namespace mtlkd::nk {

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation.
Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

// x W + b; `b` may be omitted (invalid Var).
Var linear(Var x, Var w, Var b);
inline Var linear(Var x, Var w) { return matmul(x, w); }

// Projections Wq, Wk, Wv (D x D) followed by fused attention and Wo.
Var multi_head_attention(Var q_src, Var kv_src, const Tensor& mask, int heads, Var wq, Var wk,
                         Var wv, Var wo, int groups = 1);

// relu(x W1 + b1) W2 + b2
Var feed_forward(Var x, Var w1, Var b1, Var w2, Var b2);

// Layers hold parameter indices into a store owned by the model.

struct LinearLayer {
  int weight = -1;
  int bias = -1;

  static LinearLayer create(ParameterStore& store, const std::string& name, std::size_t in,
                            std::size_t out, Rng& rng, bool with_bias = true);
  Var operator()(Tape& tape, const ParameterStore& store, Var x) const;
};

struct AttentionLayer {
  int wq = -1, wk = -1, wv = -1, wo = -1;
  int heads = 1;

  static AttentionLayer create(ParameterStore& store, const std::string& name, std::size_t dim,
                               int heads, Rng& rng);
  Var operator()(Tape& tape, const ParameterStore& store, Var q_src, Var kv_src,
                 const Tensor& mask, int groups = 1) const;
};

struct FeedForwardLayer {
  LinearLayer in, out;

  static FeedForwardLayer create(ParameterStore& store, const std::string& name,
                                 std::size_t dim, std::size_t hidden, Rng& rng);
  Var operator()(Tape& tape, const ParameterStore& store, Var x) const;
};

struct LayerNormLayer {
  int gamma = -1, beta = -1;

  static LayerNormLayer create(ParameterStore& store, const std::string& name, std::size_t dim);
  Var operator()(Tape& tape, const ParameterStore& store, Var x) const;
};

}  // namespace mtlkd::nk
