#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mtlkd/core/construct.hpp"
#include "mtlkd/core/decode.hpp"
#include "mtlkd/core/instance.hpp"
#include "mtlkd/nk/tape.hpp"

namespace mtlkd::policy {

// Per-instance decoding context of a policy network. The instance encoding
// is computed once when the rollout starts; each call decodes one or more
// states of that instance.
class PolicyRollout {
 public:
  virtual ~PolicyRollout() = default;

  // One row of log-probabilities over all nodes per state. Masked nodes are
  // exactly -infinity. No state may be done.
  virtual nk::Var log_probs(std::span<const DecodeState> states) = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::unique_ptr<PolicyRollout> begin(nk::Tape& tape, const Instance& inst) const = 0;
  virtual const nk::ParameterStore& params() const = 0;
  virtual nk::ParameterStore& params() = 0;
};

// Probability vector of row `r` of a log-probability matrix.
std::vector<double> row_probabilities(const nk::Tensor& log_probs, std::size_t r = 0);

// Inference adapter for construct(): encodes `inst` once on a private
// non-recording tape. The returned callable must only be used with `inst`.
StepPolicy make_step_policy(const Policy& policy, const Instance& inst);

// Greedy (or sampled) construction with a network policy.
Construction construct_with(const Policy& policy, const Instance& inst, Rng& rng,
                            const ConstructOptions& opts = {});

}  // namespace mtlkd::policy
