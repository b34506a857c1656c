#include "mtlkd/train/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "mtlkd/core/error.hpp"
#include "mtlkd/data/generate.hpp"

namespace mtlkd::train {

std::string TrainConfig::echo() const {
  std::map<std::string, std::string> kv;
  kv["alpha"] = std::to_string(alpha);
  kv["batch_size"] = std::to_string(batch_size);
  kv["epochs"] = std::to_string(epochs);
  kv["instances_per_epoch"] = std::to_string(instances_per_epoch);
  kv["kd_trajectory"] = kd_trajectory == DecodeMode::kSample ? "sample" : "greedy";
  kv["lr0"] = std::to_string(lr0);
  kv["lr_hold"] = std::to_string(lr_hold);
  kv["lr_period"] = std::to_string(lr_period);
  kv["n"] = std::to_string(n);
  kv["per_task_batch"] = std::to_string(per_task_batch);
  kv["seed"] = std::to_string(seed);
  kv["starts"] = std::to_string(starts);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 0 || instances_per_epoch < 1 || batch_size < 1 || per_task_batch < 1 || n < 1) {
    throw ConfigError("train: epochs, instance counts, batch sizes and n must be positive");
  }
  if (starts < 1 || starts > n) throw ConfigError("train: starts must be in [1, n]");
  if (!(lr0 > 0) || lr_hold < 0 || lr_period < 1) throw ConfigError("train: bad learning-rate schedule");
  if (alpha != 1.0) throw ConfigError("train: only alpha = 1 (pure distillation) is supported");
  if (threads < 1) throw ConfigError("train: threads must be >= 1");
}

TrainConfig TrainConfig::toy_teacher() {
  TrainConfig c;
  c.epochs = 200;
  c.instances_per_epoch = 512;
  c.batch_size = 64;
  c.n = 10;
  c.starts = 8;
  c.lr0 = 1e-4;
  return c;
}

TrainConfig TrainConfig::toy_student() {
  TrainConfig c;
  c.epochs = 300;
  c.instances_per_epoch = 128;
  c.per_task_batch = 16;
  c.batch_size = 32;
  c.n = 10;
  c.starts = 8;
  c.lr0 = 1e-3;
  return c;
}

TrainConfig TrainConfig::paper_teacher() {
  TrainConfig c;
  c.epochs = 4000;
  c.instances_per_epoch = 10000;
  c.batch_size = 64;
  c.n = 100;
  c.starts = 100;
  c.lr0 = 1e-4;
  return c;
}

TrainConfig TrainConfig::paper_student() {
  TrainConfig c;
  c.epochs = 850;
  c.instances_per_epoch = 10000;
  c.per_task_batch = 250;
  c.batch_size = 1500;
  c.n = 100;
  c.starts = 10;
  c.lr0 = 1e-4;
  return c;
}

double lr_schedule(int epoch, double lr0, int hold, int period) {
  if (epoch <= hold) return lr0;
  const int halvings = (epoch - hold - 1) / period + 1;
  return lr0 * std::pow(0.5, halvings);
}

std::string format_log_line(const EpochLog& log) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d\t%.9g\t%.6g\t%.3f", log.epoch, log.loss, log.lr,
                log.wallclock);
  return buf;
}

TrainState initial_train_state(const nk::ParameterStore& params, std::uint64_t seed) {
  TrainState s;
  s.adam = nk::AdamState::for_store(params);
  s.rng = Rng(seed, 0x7ea1);
  return s;
}

std::vector<Instance> epoch_instances(VariantSpec task, int n, int count, std::uint64_t seed,
                                      int epoch) {
  Rng r = Rng(seed, 1'000'000 + static_cast<std::uint64_t>(epoch)).substream(task.bits());
  return data::generate_instances(task, n, count, r.next_u64());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

void train_teacher(policy::TeacherModel& teacher, VariantSpec task, const TrainConfig& cfg,
                   TrainState& state, int until_epoch, const EpochLogger& log) {
  cfg.validate();
  const auto t0 = Clock::now();
  ReinforceOptions opts;
  opts.starts = cfg.starts;
  opts.threads = cfg.threads;
  while (state.epoch < until_epoch) {
    const int epoch = state.epoch + 1;
    const double lr = lr_schedule(epoch, cfg.lr0, cfg.lr_hold, cfg.lr_period);
    const std::vector<Instance> data =
        epoch_instances(task, cfg.n, cfg.instances_per_epoch, cfg.seed, epoch);
    double loss = 0;
    int steps = 0;
    for (std::size_t lo = 0; lo < data.size(); lo += cfg.batch_size) {
      const std::size_t count = std::min<std::size_t>(cfg.batch_size, data.size() - lo);
      StepResult r = reinforce_teacher_step(teacher, {data.data() + lo, count}, state.rng, opts);
      nk::adam_update(teacher.params(), r.grads, state.adam, {lr});
      loss += r.loss;
      ++steps;
    }
    state.epoch = epoch;
    if (log) log({epoch, loss / steps, lr, seconds_since(t0)});
  }
}

void train_student(policy::StudentModel& student, std::span<const TeacherSlot> teachers,
                   const TrainConfig& cfg, TrainState& state, int until_epoch,
                   const EpochLogger& log) {
  cfg.validate();
  if (teachers.empty()) throw ConfigError("student training needs at least one teacher");
  if (cfg.batch_size != cfg.per_task_batch * static_cast<int>(teachers.size())) {
    throw ConfigError("batch_size must equal per_task_batch x number of tasks");
  }
  const auto t0 = Clock::now();
  KdOptions opts;
  opts.trajectory = cfg.kd_trajectory;
  opts.threads = cfg.threads;
  while (state.epoch < until_epoch) {
    const int epoch = state.epoch + 1;
    const double lr = lr_schedule(epoch, cfg.lr0, cfg.lr_hold, cfg.lr_period);
    std::vector<std::vector<Instance>> per_task;
    for (const auto& t : teachers) {
      per_task.push_back(epoch_instances(t.variant, cfg.n, cfg.instances_per_epoch, cfg.seed, epoch));
    }
    double loss = 0;
    int steps = 0;
    for (int lo = 0; lo < cfg.instances_per_epoch; lo += cfg.per_task_batch) {
      const int count = std::min(cfg.per_task_batch, cfg.instances_per_epoch - lo);
      std::vector<Instance> batch;
      for (const auto& task_data : per_task) {
        batch.insert(batch.end(), task_data.begin() + lo, task_data.begin() + lo + count);
      }
      StepResult r = kd_student_step(student, teachers, batch, state.rng, opts);
      nk::adam_update(student.params(), r.grads, state.adam, {lr});
      loss += r.loss;
      ++steps;
    }
    state.epoch = epoch;
    if (log) log({epoch, loss / steps, lr, seconds_since(t0)});
  }
}

Checkpoint make_checkpoint(const policy::TeacherModel& teacher, VariantSpec task,
                           const TrainConfig& cfg, const TrainState& state) {
  Checkpoint ck;
  ck.kind = ModelKind::kTeacher;
  ck.task = task;
  ck.teacher_config = teacher.config();
  ck.config_echo = cfg.echo();
  ck.params = teacher.params();
  ck.adam = state.adam;
  ck.epoch = state.epoch;
  ck.rng = state.rng.cursor();
  return ck;
}

Checkpoint make_checkpoint(const policy::StudentModel& student,
                           const std::vector<VariantSpec>& tasks, const TrainConfig& cfg,
                           const TrainState& state) {
  Checkpoint ck;
  ck.kind = ModelKind::kStudent;
  ck.tasks = tasks;
  ck.student_config = student.config();
  ck.config_echo = cfg.echo();
  ck.params = student.params();
  ck.adam = state.adam;
  ck.epoch = state.epoch;
  ck.rng = state.rng.cursor();
  return ck;
}

TrainState restore_state(const Checkpoint& ck) {
  TrainState s;
  s.adam = ck.adam;
  s.epoch = ck.epoch;
  s.rng = Rng(ck.rng);
  return s;
}

}  // namespace mtlkd::train
