#pragma once

#include <functional>
#include <vector>

#include "mtlkd/core/decode.hpp"
#include "mtlkd/core/instance.hpp"
#include "mtlkd/core/rng.hpp"
#include "mtlkd/core/solution.hpp"

namespace mtlkd {

enum class DecodeMode { kGreedy, kSample };

// Maps a state to a probability vector over all nodes. The vector must be
// zero on every node masked by feasibility_mask().
using StepPolicy =
    std::function<std::vector<double>(const Instance&, const DecodeState&)>;

// One construction step: the distribution the policy emitted, the mask it was
// checked against and the action taken.
struct StepDistribution {
  std::vector<double> probs;
  FeasibilityMask mask;
  int action = -1;
};

struct Construction {
  Solution solution;
  std::vector<int> actions;
  std::vector<StepDistribution> trace;  // empty unless requested
};

struct ConstructOptions {
  DecodeMode mode = DecodeMode::kGreedy;
  bool record_trace = false;
  int forced_first = -1;  // customer taken as first action, if >= 1
};

// Builds a solution autoregressively. Greedy mode takes the argmax with ties
// broken toward the lowest node index. Throws ContractViolation if the
// policy puts positive mass on a masked node.
Construction construct(const Instance& inst, const StepPolicy& policy, Rng& rng,
                       const ConstructOptions& opts = {});

// Picks an action from a probability vector per `mode`.
int select_action(const std::vector<double>& probs, DecodeMode mode, Rng& rng);

// Uniform distribution over the currently allowed nodes.
StepPolicy uniform_policy();

}  // namespace mtlkd
