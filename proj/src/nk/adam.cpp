#include "mtlkd/nk/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mtlkd::nk {

AdamState AdamState::for_store(const ParameterStore& store) {
  AdamState s;
  s.m = zero_gradients(store);
  s.v = zero_gradients(store);
  return s;
}

void adam_update(ParameterStore& params, const Gradients& grads, AdamState& state,
                 const AdamConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw std::invalid_argument("adam_update: parameter/gradient count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].same_shape(params[i].value) || !state.m[i].same_shape(params[i].value)) {
      throw std::invalid_argument("adam_update: shape mismatch for " + params[i].name);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].value.values();
    auto g = grads[i].values();
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = static_cast<Real>(cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k]);
      v[k] = static_cast<Real>(cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k]);
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      p[k] -= static_cast<Real>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
    }
  }
}

}  // namespace mtlkd::nk
