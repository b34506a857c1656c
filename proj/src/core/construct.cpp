#include "mtlkd/core/construct.hpp"

#include <cmath>
#include <string>

#include "mtlkd/core/error.hpp"

namespace mtlkd {

int select_action(const std::vector<double>& probs, DecodeMode mode, Rng& rng) {
  if (mode == DecodeMode::kSample) return static_cast<int>(rng.categorical(probs));
  int best = -1;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    if (probs[i] > 0.0 && (best < 0 || probs[i] > probs[best])) best = i;
  }
  if (best < 0) throw ContractViolation("policy returned no probability mass");
  return best;
}

Construction construct(const Instance& inst, const StepPolicy& policy, Rng& rng,
                       const ConstructOptions& opts) {
  Construction out;
  DecodeState state = initial_state(inst);
  const int nodes = inst.num_nodes();
  while (!state.done) {
    FeasibilityMask mask = feasibility_mask(inst, state);
    if (mask.allowed_count() == 0) {
      throw ContractViolation("construct: every action is masked");
    }
    int action;
    std::vector<double> probs;
    if (out.actions.empty() && opts.forced_first >= 1) {
      action = opts.forced_first;
      if (action >= nodes || !mask.allowed[action]) {
        throw ContractViolation("construct: forced first action is infeasible");
      }
    } else {
      probs = policy(inst, state);
      if (static_cast<int>(probs.size()) != nodes) {
        throw ContractViolation("policy returned a vector of the wrong length");
      }
      for (int i = 0; i < nodes; ++i) {
        if (!mask.allowed[i] && probs[i] > 0.0) {
          throw ContractViolation("policy put mass " + std::to_string(probs[i]) +
                                  " on masked node " + std::to_string(i) + " (" +
                                  std::string(to_string(mask.reason[i])) + ")");
        }
        if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
          throw ContractViolation("policy returned an invalid probability");
        }
      }
      action = select_action(probs, opts.mode, rng);
    }
    apply_action(inst, state, action);
    out.actions.push_back(action);
    if (opts.record_trace) {
      out.trace.push_back({std::move(probs), std::move(mask), action});
    }
  }
  out.solution = Solution::from_actions(out.actions);
  return out;
}

StepPolicy uniform_policy() {
  return [](const Instance& inst, const DecodeState& state) {
    const FeasibilityMask mask = feasibility_mask(inst, state);
    std::vector<double> p(mask.allowed.size(), 0.0);
    const double w = 1.0 / mask.allowed_count();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (mask.allowed[i]) p[i] = w;
    }
    return p;
  };
}

}  // namespace mtlkd
