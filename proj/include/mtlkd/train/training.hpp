#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mtlkd/core/rng.hpp"
#include "mtlkd/nk/adam.hpp"
#include "mtlkd/policy/student.hpp"
#include "mtlkd/policy/teacher.hpp"
#include "mtlkd/train/checkpoint.hpp"
#include "mtlkd/train/losses.hpp"

namespace mtlkd::train {

struct TrainConfig {
  int epochs = 200;
  int instances_per_epoch = 512;  // per task
  int batch_size = 64;            // teacher: instances per step; student: per_task_batch * tasks
  int per_task_batch = 16;
  int n = 10;
  int starts = 8;
  double lr0 = 1e-4;
  int lr_hold = 300;
  int lr_period = 100;
  double alpha = 1.0;  // weight of the distillation term; the task term is not implemented
  DecodeMode kd_trajectory = DecodeMode::kSample;
  std::uint64_t seed = 1;
  int threads = 1;

  // key=value lines, sorted by key.
  std::string echo() const;
  // Throws ConfigError on nonsensical values.
  void validate() const;

  static TrainConfig toy_teacher();
  static TrainConfig toy_student();
  static TrainConfig paper_teacher();
  static TrainConfig paper_student();
};

// lr0 through epoch `hold`, then halved every `period` epochs, the first
// halving taking effect at epoch hold + 1.
double lr_schedule(int epoch, double lr0 = 1e-4, int hold = 300, int period = 100);

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  double wallclock = 0.0;  // seconds since the run (or resume) started
};
using EpochLogger = std::function<void(const EpochLog&)>;

// Tab-separated training-log line: epoch, loss, lr, wallclock.
std::string format_log_line(const EpochLog& log);

// Optimizer state and RNG carried across epochs; round-trips through a
// checkpoint.
struct TrainState {
  nk::AdamState adam;
  int epoch = 0;  // epochs completed
  Rng rng{0};
};

TrainState initial_train_state(const nk::ParameterStore& params, std::uint64_t seed);

// Training instances of one epoch, a pure function of (seed, epoch, task).
std::vector<Instance> epoch_instances(VariantSpec task, int n, int count, std::uint64_t seed,
                                      int epoch);

// Runs epochs state.epoch + 1 .. until_epoch.
void train_teacher(policy::TeacherModel& teacher, VariantSpec task, const TrainConfig& cfg,
                   TrainState& state, int until_epoch, const EpochLogger& log = {});
void train_student(policy::StudentModel& student, std::span<const TeacherSlot> teachers,
                   const TrainConfig& cfg, TrainState& state, int until_epoch,
                   const EpochLogger& log = {});

Checkpoint make_checkpoint(const policy::TeacherModel& teacher, VariantSpec task,
                           const TrainConfig& cfg, const TrainState& state);
Checkpoint make_checkpoint(const policy::StudentModel& student,
                           const std::vector<VariantSpec>& tasks, const TrainConfig& cfg,
                           const TrainState& state);
TrainState restore_state(const Checkpoint& ck);

}  // namespace mtlkd::train
