#pragma once

#include <vector>

#include "mtlkd/nk/tape.hpp"

namespace mtlkd::nk {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moments per parameter plus the step counter.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long long step = 0;

  static AdamState for_store(const ParameterStore& store);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam step; `cfg.lr` is the learning rate for this step.
// Throws std::invalid_argument on a shape mismatch.
void adam_update(ParameterStore& params, const Gradients& grads, AdamState& state,
                 const AdamConfig& cfg);

}  // namespace mtlkd::nk
