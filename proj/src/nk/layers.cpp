#include "mtlkd/nk/layers.hpp"

#include <cmath>

namespace mtlkd::nk {

Tensor uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(rows, cols);
  for (auto& x : t.values()) x = static_cast<Real>(rng.uniform(-bound, bound));
  return t;
}

Var linear(Var x, Var w, Var b) {
  Var y = matmul(x, w);
  return b.tape ? add(y, b) : y;
}

Var multi_head_attention(Var q_src, Var kv_src, const Tensor& mask, int heads, Var wq, Var wk,
                         Var wv, Var wo, int groups) {
  Var q = matmul(q_src, wq);
  Var k = matmul(kv_src, wk);
  Var v = matmul(kv_src, wv);
  return matmul(attention(q, k, v, mask, heads, groups), wo);
}

Var feed_forward(Var x, Var w1, Var b1, Var w2, Var b2) {
  return linear(relu(linear(x, w1, b1)), w2, b2);
}

LinearLayer LinearLayer::create(ParameterStore& store, const std::string& name, std::size_t in,
                                std::size_t out, Rng& rng, bool with_bias) {
  LinearLayer l;
  l.weight = store.add(name + ".weight", uniform_init(in, out, in, rng));
  if (with_bias) l.bias = store.add(name + ".bias", uniform_init(1, out, in, rng));
  return l;
}

Var LinearLayer::operator()(Tape& tape, const ParameterStore& store, Var x) const {
  Var w = tape.param(store, weight);
  if (bias < 0) return matmul(x, w);
  return linear(x, w, tape.param(store, bias));
}

AttentionLayer AttentionLayer::create(ParameterStore& store, const std::string& name,
                                      std::size_t dim, int heads, Rng& rng) {
  AttentionLayer a;
  a.heads = heads;
  a.wq = store.add(name + ".wq", uniform_init(dim, dim, dim, rng));
  a.wk = store.add(name + ".wk", uniform_init(dim, dim, dim, rng));
  a.wv = store.add(name + ".wv", uniform_init(dim, dim, dim, rng));
  a.wo = store.add(name + ".wo", uniform_init(dim, dim, dim, rng));
  return a;
}

Var AttentionLayer::operator()(Tape& tape, const ParameterStore& store, Var q_src, Var kv_src,
                               const Tensor& mask, int groups) const {
  return multi_head_attention(q_src, kv_src, mask, heads, tape.param(store, wq),
                              tape.param(store, wk), tape.param(store, wv),
                              tape.param(store, wo), groups);
}

FeedForwardLayer FeedForwardLayer::create(ParameterStore& store, const std::string& name,
                                          std::size_t dim, std::size_t hidden, Rng& rng) {
  return {LinearLayer::create(store, name + ".ff1", dim, hidden, rng),
          LinearLayer::create(store, name + ".ff2", hidden, dim, rng)};
}

Var FeedForwardLayer::operator()(Tape& tape, const ParameterStore& store, Var x) const {
  return feed_forward(x, tape.param(store, in.weight), tape.param(store, in.bias),
                      tape.param(store, out.weight), tape.param(store, out.bias));
}

LayerNormLayer LayerNormLayer::create(ParameterStore& store, const std::string& name,
                                      std::size_t dim) {
  LayerNormLayer n;
  n.gamma = store.add(name + ".norm.gamma", Tensor(1, dim, Real(1)));
  n.beta = store.add(name + ".norm.beta", Tensor(1, dim));
  return n;
}

Var LayerNormLayer::operator()(Tape& tape, const ParameterStore& store, Var x) const {
  return layer_norm(x, tape.param(store, gamma), tape.param(store, beta));
}

}  // namespace mtlkd::nk
