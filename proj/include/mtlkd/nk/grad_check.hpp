#pragma once

#include <functional>

#include "mtlkd/nk/tape.hpp"

namespace mtlkd::nk {

// Builds a scalar loss on the given tape from parameters of a store.
using LossFn = std::function<Var(Tape&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  std::size_t kinks = 0;  // coordinates re-measured with a smaller step
};

// One-sided slopes differing by more than this mean a kink (ReLU) lies
// within the step.
inline constexpr double kKinkTolerance = 1e-3;

// Compares backward() against central differences for every scalar of every
// parameter in `store`:
//   max |analytic - numeric| / max(1, |analytic|).
// A coordinate whose step straddles a kink is re-measured with the step
// shrunk 100x, at most twice.
// The store is perturbed in place and restored.
GradCheckResult grad_check(const LossFn& f, ParameterStore& store, double eps = 1e-5);

}  // namespace mtlkd::nk
