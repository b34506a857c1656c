#pragma once

#include "mtlkd/core/decode.hpp"
#include "mtlkd/core/instance.hpp"
#include "mtlkd/nk/tensor.hpp"

namespace mtlkd::policy {

inline constexpr std::size_t kNodeFeatureDim = 6;
inline constexpr std::size_t kDynamicFeatureDim = 4;

// (x, y, demand / capacity, service time, earliest, latest) per node. Fields
// of inactive constraints are zero so one weight set serves every variant.
nk::Tensor node_features(const Instance& inst);

// Dynamic route state (remaining load / capacity, current time, remaining
// distance budget, open flag) as a 1x4 row; inactive fields are zero.
nk::Tensor dynamic_features(const Instance& inst, const DecodeState& state);

}  // namespace mtlkd::policy
