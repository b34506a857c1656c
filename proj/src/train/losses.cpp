#include "mtlkd/train/losses.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "mtlkd/core/error.hpp"
#include "mtlkd/core/solution.hpp"
#include "mtlkd/nk/ops.hpp"
#include "mtlkd/train/parallel.hpp"

namespace mtlkd::train {

namespace {

struct InstanceResult {
  double loss = 0.0;
  nk::Gradients grads;
  double objective_sum = 0.0;
  long long steps = 0;
};

// Reduces per-instance results in index order so the sum never depends on
// how instances were spread over threads.
StepResult reduce(std::vector<InstanceResult>& parts, const nk::ParameterStore& store,
                  std::size_t rollouts) {
  StepResult out;
  out.grads = nk::zero_gradients(store);
  for (auto& p : parts) {
    out.loss += p.loss;
    out.mean_objective += p.objective_sum;
    out.steps += p.steps;
    if (!p.grads.empty()) nk::accumulate(out.grads, p.grads);
  }
  out.mean_objective /= static_cast<double>(rollouts);
  return out;
}

nk::Tensor probabilities_of(const nk::Tensor& log_probs) {
  nk::Tensor p(log_probs.rows(), log_probs.cols());
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t c = 0; c < p.cols(); ++c) p(r, c) = std::exp(log_probs(r, c));
  }
  return p;
}

struct PickRecord {
  nk::Var log_probs;
  std::vector<nk::PickEntry> entries;  // weight slot holds the start index
};

InstanceResult reinforce_one(const policy::Policy& teacher, const Instance& inst, Rng& rng,
                             int K, double weight, double reward_offset) {
  const int n = inst.num_customers();
  nk::Tape tape(true);
  auto roll = teacher.begin(tape, inst);

  std::vector<int> firsts(n);
  std::iota(firsts.begin(), firsts.end(), 1);
  if (K < n) {
    // Partial Fisher-Yates: K distinct customers.
    for (int k = 0; k < K; ++k) {
      const auto j = static_cast<int>(rng.uniform_int(k, n - 1));
      std::swap(firsts[k], firsts[j]);
    }
  }
  std::vector<DecodeState> states(K, initial_state(inst));
  std::vector<std::vector<int>> actions(K);
  for (int k = 0; k < K; ++k) {
    apply_action(inst, states[k], firsts[k]);
    actions[k].push_back(firsts[k]);
  }

  std::vector<PickRecord> records;
  std::vector<int> active;
  std::vector<DecodeState> batch;
  for (;;) {
    active.clear();
    batch.clear();
    for (int k = 0; k < K; ++k) {
      if (!states[k].done) {
        active.push_back(k);
        batch.push_back(states[k]);
      }
    }
    if (active.empty()) break;
    PickRecord rec{roll->log_probs(batch), {}};
    const nk::Tensor& lp = rec.log_probs.value();
    for (std::size_t r = 0; r < active.size(); ++r) {
      const std::vector<double> p = policy::row_probabilities(lp, r);
      const int a = static_cast<int>(rng.categorical(p));
      rec.entries.push_back({r, static_cast<std::size_t>(a), nk::Real(active[r])});
      apply_action(inst, states[active[r]], a);
      actions[active[r]].push_back(a);
    }
    records.push_back(std::move(rec));
  }

  InstanceResult res;
  std::vector<double> reward(K);
  for (int k = 0; k < K; ++k) {
    const double obj = evaluate(inst, Solution::from_actions(actions[k]));
    res.objective_sum += obj;
    reward[k] = -obj + reward_offset;
  }
  const double baseline = std::accumulate(reward.begin(), reward.end(), 0.0) / K;

  std::vector<nk::Var> terms;
  for (auto& rec : records) {
    for (auto& e : rec.entries) {
      const int k = static_cast<int>(e.weight);
      e.weight = nk::Real(-(reward[k] - baseline) * weight);
    }
    terms.push_back(nk::weighted_pick(rec.log_probs, rec.entries));
    res.steps += static_cast<long long>(rec.entries.size());
  }
  if (terms.empty()) return res;
  nk::Var loss = nk::sum(nk::concat_rows(terms));
  res.loss = loss.value().item();
  res.grads = tape.backward(loss, teacher.params());
  return res;
}

const policy::Policy& route_teacher(std::span<const TeacherSlot> teachers, VariantSpec v) {
  for (const auto& t : teachers) {
    if (t.variant == v && t.model != nullptr) return *t.model;
  }
  throw ContractViolation("no teacher for variant " + v.name());
}

// One distillation rollout. The KL terms are recorded on `stape`; the
// teacher runs on its own non-recording tape.
struct KdRollout {
  std::vector<nk::Var> kl_terms;
  double kl_total = 0.0;
};

KdRollout kd_one(const policy::StudentModel& student, const policy::Policy& teacher,
                 const Instance& inst, nk::Tape& stape, Rng& rng, DecodeMode mode) {
  auto sroll = student.begin(stape, inst);
  nk::Tape ttape(false);
  auto troll = teacher.begin(ttape, inst);
  const std::size_t mark = ttape.node_count();

  KdRollout out;
  DecodeState s = initial_state(inst);
  while (!s.done) {
    nk::Var logq = sroll->log_probs({&s, 1});
    const nk::Tensor p = probabilities_of(troll->log_probs({&s, 1}).value());
    ttape.truncate(mark);
    nk::Var kl = nk::kl_div(p, logq);
    out.kl_total += kl.value().item();
    out.kl_terms.push_back(kl);
    const int a = select_action(policy::row_probabilities(logq.value()), mode, rng);
    apply_action(inst, s, a);
  }
  return out;
}

void check_single_variant(std::span<const Instance> batch) {
  for (const auto& inst : batch) {
    if (inst.variant != batch.front().variant) {
      throw ContractViolation("teacher batch mixes variants");
    }
  }
}

}  // namespace

StepResult reinforce_teacher_step(const policy::Policy& teacher, std::span<const Instance> batch,
                                  Rng& rng, const ReinforceOptions& opts) {
  if (batch.empty()) throw ContractViolation("reinforce: empty batch");
  check_single_variant(batch);
  for (const auto& inst : batch) {
    if (opts.starts < 1 || opts.starts > inst.num_customers()) {
      throw ContractViolation("reinforce: K=" + std::to_string(opts.starts) +
                              " exceeds customer count " +
                              std::to_string(inst.num_customers()));
    }
  }
  const std::uint64_t base = rng.next_u64();
  const double weight = 1.0 / (static_cast<double>(opts.starts) * batch.size());
  std::vector<InstanceResult> parts(batch.size());
  parallel_for(static_cast<int>(batch.size()), opts.threads, [&](int i) {
    Rng local(base, static_cast<std::uint64_t>(i));
    parts[i] = reinforce_one(teacher, batch[i], local, opts.starts, weight, opts.reward_offset);
  });
  return reduce(parts, teacher.params(), batch.size() * opts.starts);
}

StepResult kd_student_step(const policy::StudentModel& student,
                           std::span<const TeacherSlot> teachers,
                           std::span<const Instance> batch, Rng& rng, const KdOptions& opts) {
  if (batch.empty()) throw ContractViolation("kd: empty batch");
  std::map<std::uint8_t, int> per_task;
  for (const auto& inst : batch) {
    route_teacher(teachers, inst.variant);
    ++per_task[inst.variant.bits()];
  }
  const std::uint64_t base = rng.next_u64();
  std::vector<InstanceResult> parts(batch.size());
  parallel_for(static_cast<int>(batch.size()), opts.threads, [&](int i) {
    const Instance& inst = batch[i];
    Rng local(base, static_cast<std::uint64_t>(i));
    nk::Tape tape(true);
    KdRollout r = kd_one(student, route_teacher(teachers, inst.variant), inst, tape, local,
                         opts.trajectory);
    const double w = 1.0 / per_task.at(inst.variant.bits());
    nk::Var loss = nk::scale(nk::sum(nk::concat_rows(r.kl_terms)), nk::Real(w));
    parts[i].loss = loss.value().item();
    parts[i].steps = static_cast<long long>(r.kl_terms.size());
    parts[i].grads = tape.backward(loss, student.params());
  });
  return reduce(parts, student.params(), batch.size());
}

double mean_step_kl(const policy::StudentModel& student, std::span<const TeacherSlot> teachers,
                    std::span<const Instance> instances, Rng& rng, const KdOptions& opts) {
  const std::uint64_t base = rng.next_u64();
  std::vector<double> total(instances.size());
  std::vector<long long> steps(instances.size());
  parallel_for(static_cast<int>(instances.size()), opts.threads, [&](int i) {
    Rng local(base, static_cast<std::uint64_t>(i));
    nk::Tape tape(false);
    KdRollout r = kd_one(student, route_teacher(teachers, instances[i].variant), instances[i],
                         tape, local, opts.trajectory);
    total[i] = r.kl_total;
    steps[i] = static_cast<long long>(r.kl_terms.size());
  });
  double kl = 0;
  long long count = 0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    kl += total[i];
    count += steps[i];
  }
  return count == 0 ? 0.0 : kl / static_cast<double>(count);
}

std::vector<double> greedy_objectives(const policy::Policy& model,
                                      std::span<const Instance> instances, int threads) {
  std::vector<double> out(instances.size());
  parallel_for(static_cast<int>(instances.size()), threads, [&](int i) {
    Rng unused(0);
    const Construction c = policy::construct_with(model, instances[i], unused);
    out[i] = evaluate(instances[i], c.solution);
  });
  return out;
}

}  // namespace mtlkd::train
