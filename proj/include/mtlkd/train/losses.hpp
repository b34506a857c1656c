#pragma once

#include <span>
#include <vector>

#include "mtlkd/core/construct.hpp"
#include "mtlkd/core/rng.hpp"
#include "mtlkd/policy/policy.hpp"
#include "mtlkd/policy/student.hpp"

namespace mtlkd::train {

struct StepResult {
  double loss = 0.0;
  nk::Gradients grads;
  double mean_objective = 0.0;  // over all rollouts of the batch
  long long steps = 0;          // decoding steps that contributed a loss term
};

struct ReinforceOptions {
  int starts = 8;  // K multi-start rollouts per instance
  int threads = 1;
  // Added to every reward; the baseline cancels it (used by tests).
  double reward_offset = 0.0;
};

// Multi-start REINFORCE with the mean reward over the K starts of an
// instance as baseline. Start k's first customer is forced (distinct per
// start) and carries no log-probability; the remaining actions are sampled.
//   loss = -mean_{instances, k} (r_k - b) * sum_t log pi(a_t)
// Throws ContractViolation if the batch mixes variants or K exceeds n.
StepResult reinforce_teacher_step(const policy::Policy& teacher, std::span<const Instance> batch,
                                  Rng& rng, const ReinforceOptions& opts = {});

struct TeacherSlot {
  VariantSpec variant;
  const policy::Policy* model = nullptr;
};

struct KdOptions {
  DecodeMode trajectory = DecodeMode::kSample;
  int threads = 1;
};

// Per-step distillation: the student's own (sampled or greedy) trajectory
// is replayed through the teacher of the instance's variant in no-gradient
// mode, and the forward KL(teacher || student) of every step is summed.
//   loss = sum_tasks mean_{instances of task} sum_t KL_t
// Gradients cover the student only. Throws ContractViolation when no
// teacher matches an instance's variant.
StepResult kd_student_step(const policy::StudentModel& student,
                           std::span<const TeacherSlot> teachers,
                           std::span<const Instance> batch, Rng& rng,
                           const KdOptions& opts = {});

// Mean per-step KL over `instances` without gradients, along the student's
// trajectories (same rule as training).
double mean_step_kl(const policy::StudentModel& student, std::span<const TeacherSlot> teachers,
                    std::span<const Instance> instances, Rng& rng, const KdOptions& opts = {});

// Greedy objective of a policy on each instance.
std::vector<double> greedy_objectives(const policy::Policy& model,
                                      std::span<const Instance> instances, int threads = 1);

}  // namespace mtlkd::train
