#include "mtlkd/policy/blocks.hpp"

namespace mtlkd::policy {

TransformerBlock TransformerBlock::create(nk::ParameterStore& store, const std::string& name,
                                          std::size_t dim, int heads, std::size_t ff_hidden,
                                          bool normalized, Rng& rng) {
  TransformerBlock b;
  b.attn = nk::AttentionLayer::create(store, name + ".attn", dim, heads, rng);
  b.ff = nk::FeedForwardLayer::create(store, name + ".ff", dim, ff_hidden, rng);
  b.normalized = normalized;
  if (normalized) {
    b.norm1 = nk::LayerNormLayer::create(store, name + ".n1", dim);
    b.norm2 = nk::LayerNormLayer::create(store, name + ".n2", dim);
  }
  return b;
}

nk::Var TransformerBlock::operator()(nk::Tape& tape, const nk::ParameterStore& store,
                                     nk::Var h, const nk::Tensor& mask, int groups) const {
  nk::Var x = nk::add(h, attn(tape, store, h, h, mask, groups));
  if (normalized) x = norm1(tape, store, x);
  nk::Var y = nk::add(x, ff(tape, store, x));
  if (normalized) y = norm2(tape, store, y);
  return y;
}

}  // namespace mtlkd::policy
