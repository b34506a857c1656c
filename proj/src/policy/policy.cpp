#include "mtlkd/policy/policy.hpp"

#include <cmath>

#include "mtlkd/core/error.hpp"

namespace mtlkd::policy {

std::vector<double> row_probabilities(const nk::Tensor& log_probs, std::size_t r) {
  std::vector<double> p(log_probs.cols());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::exp(static_cast<double>(log_probs(r, j)));
  return p;
}

namespace {

struct InferenceSession {
  const Instance* inst;
  nk::Tape tape{false};
  std::unique_ptr<PolicyRollout> rollout;
  std::size_t mark = 0;
};

}  // namespace

StepPolicy make_step_policy(const Policy& policy, const Instance& inst) {
  auto session = std::make_shared<InferenceSession>();
  session->inst = &inst;
  session->rollout = policy.begin(session->tape, inst);
  session->mark = session->tape.node_count();
  return [session](const Instance& i, const DecodeState& state) {
    if (&i != session->inst) {
      throw ContractViolation("step policy used with a different instance");
    }
    const DecodeState states[1] = {state};
    std::vector<double> p = row_probabilities(session->rollout->log_probs(states).value());
    session->tape.truncate(session->mark);
    return p;
  };
}

Construction construct_with(const Policy& policy, const Instance& inst, Rng& rng,
                            const ConstructOptions& opts) {
  return construct(inst, make_step_policy(policy, inst), rng, opts);
}

}  // namespace mtlkd::policy
