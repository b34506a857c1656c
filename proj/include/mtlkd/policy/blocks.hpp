#pragma once

#include <string>

#include "mtlkd/nk/layers.hpp"

namespace mtlkd::policy {

// Transformer layer: h + MHA(h), then + FF. With `normalized` each residual
// sum is followed by a layer norm (post-norm); without it the layer holds no
// normalization parameters at all.
struct TransformerBlock {
  nk::AttentionLayer attn;
  nk::FeedForwardLayer ff;
  nk::LayerNormLayer norm1, norm2;
  bool normalized = false;

  static TransformerBlock create(nk::ParameterStore& store, const std::string& name,
                                 std::size_t dim, int heads, std::size_t ff_hidden,
                                 bool normalized, Rng& rng);
  nk::Var operator()(nk::Tape& tape, const nk::ParameterStore& store, nk::Var h,
                     const nk::Tensor& mask = {}, int groups = 1) const;
};

}  // namespace mtlkd::policy
