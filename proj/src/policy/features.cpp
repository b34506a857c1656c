#include "mtlkd/policy/features.hpp"

namespace mtlkd::policy {

nk::Tensor node_features(const Instance& inst) {
  const int n = inst.num_nodes();
  nk::Tensor f(n, kNodeFeatureDim);
  for (int i = 0; i < n; ++i) {
    f(i, 0) = inst.coords[i].x;
    f(i, 1) = inst.coords[i].y;
    f(i, 2) = inst.demand[i] / inst.capacity;
    if (inst.variant.time_window) {
      f(i, 3) = inst.service_time[i];
      f(i, 4) = inst.tw[i].earliest;
      f(i, 5) = inst.tw[i].latest;
    }
  }
  return f;
}

nk::Tensor dynamic_features(const Instance& inst, const DecodeState& state) {
  nk::Tensor d(1, kDynamicFeatureDim);
  d(0, 0) = state.l_r / inst.capacity;
  if (inst.variant.time_window) d(0, 1) = state.t_c;
  if (inst.variant.duration_limit) d(0, 2) = state.d_r;
  d(0, 3) = state.open ? 1.0 : 0.0;
  return d;
}

}  // namespace mtlkd::policy
