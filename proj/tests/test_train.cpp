#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/core/error.hpp"
#include "mtlkd/data/generate.hpp"
#include "mtlkd/train/checkpoint.hpp"
#include "mtlkd/train/losses.hpp"
#include "mtlkd/train/training.hpp"

namespace mtlkd::train {
namespace {

policy::TeacherConfig small_teacher() {
  policy::TeacherConfig c;
  c.encoder_layers = 2;
  return c;
}

policy::StudentConfig small_student() {
  policy::StudentConfig c;
  c.decoder_layers = 2;
  return c;
}

double max_abs(const nk::Gradients& g) {
  double m = 0;
  for (const auto& t : g) {
    for (std::size_t i = 0; i < t.rows(); ++i) {
      for (std::size_t j = 0; j < t.cols(); ++j) m = std::max(m, std::abs(double(t(i, j))));
    }
  }
  return m;
}

double max_diff(const nk::Gradients& a, const nk::Gradients& b) {
  double m = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t i = 0; i < a[p].rows(); ++i) {
      for (std::size_t j = 0; j < a[p].cols(); ++j) {
        m = std::max(m, std::abs(double(a[p](i, j) - b[p](i, j))));
      }
    }
  }
  return m;
}

TEST(Schedule, HoldThenHalve) {
  EXPECT_EQ(lr_schedule(0), 1e-4);
  EXPECT_EQ(lr_schedule(300), 1e-4);
  EXPECT_DOUBLE_EQ(lr_schedule(301), 5e-5);
  EXPECT_DOUBLE_EQ(lr_schedule(400), 5e-5);
  EXPECT_DOUBLE_EQ(lr_schedule(401), 2.5e-5);
  EXPECT_DOUBLE_EQ(lr_schedule(850), 1e-4 / 64);
}

TEST(Reinforce, SingleStartHasZeroGradient) {
  policy::TeacherModel t(small_teacher(), 1);
  const auto batch = data::generate_instances(kCVRP, 6, 4, 2);
  Rng rng(3);
  const StepResult r = reinforce_teacher_step(t, batch, rng, {1, 1, 0.0});
  EXPECT_EQ(max_abs(r.grads), 0.0);
  EXPECT_GT(r.steps, 0);
}

TEST(Reinforce, EqualRewardsHaveZeroGradient) {
  policy::TeacherModel t(small_teacher(), 1);
  auto inst = data::generate_instance(kCVRP, 6, 2);
  for (auto& p : inst.coords) p = inst.coords[0];  // every route costs 0
  const std::vector<Instance> batch = {inst};
  Rng rng(3);
  EXPECT_EQ(max_abs(reinforce_teacher_step(t, batch, rng, {6, 1, 0.0}).grads), 0.0);
}

TEST(Reinforce, RewardOffsetDoesNotChangeGradient) {
  policy::TeacherModel t(small_teacher(), 1);
  const auto batch = data::generate_instances(kVRPTW, 6, 3, 4);
  Rng a(5), b(5);
  const StepResult r0 = reinforce_teacher_step(t, batch, a, {4, 1, 0.0});
  const StepResult r1 = reinforce_teacher_step(t, batch, b, {4, 1, 100.0});
  EXPECT_GT(max_abs(r0.grads), 0.0);
  EXPECT_LT(max_diff(r0.grads, r1.grads), 1e-10);
}

TEST(Reinforce, Errors) {
  policy::TeacherModel t(small_teacher(), 1);
  Rng rng(1);
  const auto batch = data::generate_instances(kCVRP, 5, 2, 1);
  EXPECT_THROW(reinforce_teacher_step(t, batch, rng, {6, 1, 0.0}), ContractViolation);
  std::vector<Instance> mixed = batch;
  mixed.push_back(data::generate_instance(kOVRP, 5, 1));
  EXPECT_THROW(reinforce_teacher_step(t, mixed, rng, {2, 1, 0.0}), ContractViolation);
}

TEST(Reinforce, ThreadCountDoesNotChangeResult) {
  policy::TeacherModel t(small_teacher(), 2);
  const auto batch = data::generate_instances(kCVRP, 8, 8, 6);
  Rng a(9), b(9);
  const StepResult r1 = reinforce_teacher_step(t, batch, a, {4, 1, 0.0});
  const StepResult r4 = reinforce_teacher_step(t, batch, b, {4, 4, 0.0});
  EXPECT_EQ(r1.loss, r4.loss);
  EXPECT_EQ(r1.grads, r4.grads);
}

TEST(Distill, CopiedStudentAsTeacherGivesZeroLoss) {
  policy::StudentModel s(small_student(), 3);
  const policy::StudentModel copy = s;
  const std::vector<TeacherSlot> slots = {{kCVRP, &copy}, {kVRPTW, &copy}};
  auto batch = data::generate_instances(kCVRP, 8, 4, 1);
  const auto tw = data::generate_instances(kVRPTW, 8, 4, 1);
  batch.insert(batch.end(), tw.begin(), tw.end());
  Rng rng(2);
  const StepResult r = kd_student_step(s, slots, batch, rng);
  EXPECT_LT(std::abs(r.loss), 1e-9);
  EXPECT_LT(max_abs(r.grads), 1e-9);
}

TEST(Distill, TeacherUntouchedAndLossNonNegative) {
  policy::StudentModel s(small_student(), 3);
  policy::TeacherModel t(small_teacher(), 4);
  const nk::ParameterStore before = t.params();
  const std::vector<TeacherSlot> slots = {{kOVRP, &t}};
  nk::AdamState adam = nk::AdamState::for_store(s.params());
  Rng rng(1);
  for (int step = 0; step < 3; ++step) {
    const auto batch = data::generate_instances(kOVRP, 7, 4, step);
    const StepResult r = kd_student_step(s, slots, batch, rng);
    EXPECT_GE(r.loss, 0.0);
    nk::adam_update(s.params(), r.grads, adam, {1e-3});
  }
  ASSERT_EQ(t.params().size(), before.size());
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(t.params()[i].value, before[i].value);
}

TEST(Distill, PerStepKlIsNonNegative) {
  policy::StudentModel s(small_student(), 5);
  policy::TeacherModel t(small_teacher(), 6);
  const std::vector<TeacherSlot> slots = {{kVRPL, &t}};
  const auto held = data::generate_instances(kVRPL, 8, 6, 3);
  Rng rng(0);
  EXPECT_GT(mean_step_kl(s, slots, held, rng), 0.0);
}

TEST(Distill, MissingTeacherIsRoutingError) {
  policy::StudentModel s(small_student(), 3);
  policy::TeacherModel t(small_teacher(), 4);
  const std::vector<TeacherSlot> slots = {{kCVRP, &t}};
  const auto batch = data::generate_instances(kOVRP, 5, 2, 1);
  Rng rng(1);
  EXPECT_THROW(kd_student_step(s, slots, batch, rng), ContractViolation);
}

TEST(Distill, ThreadCountDoesNotChangeResult) {
  policy::StudentModel s(small_student(), 7);
  policy::TeacherModel t(small_teacher(), 8);
  const std::vector<TeacherSlot> slots = {{kCVRP, &t}};
  const auto batch = data::generate_instances(kCVRP, 8, 6, 2);
  Rng a(4), b(4);
  const StepResult r1 = kd_student_step(s, slots, batch, a, {DecodeMode::kSample, 1});
  const StepResult r4 = kd_student_step(s, slots, batch, b, {DecodeMode::kSample, 4});
  EXPECT_EQ(r1.loss, r4.loss);
  EXPECT_EQ(r1.grads, r4.grads);
}

TEST(Config, EchoAndValidation) {
  TrainConfig c = TrainConfig::toy_teacher();
  EXPECT_NE(c.echo().find("lr0=0.000100\n"), std::string::npos);
  EXPECT_NO_THROW(c.validate());
  c.starts = 11;
  EXPECT_THROW(c.validate(), ConfigError);
  TrainConfig s = TrainConfig::toy_student();
  EXPECT_EQ(s.batch_size, s.per_task_batch * 2);
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.n = 6;
  c.starts = 4;
  c.instances_per_epoch = 8;
  c.batch_size = 4;
  c.per_task_batch = 4;
  c.lr0 = 1e-3;
  c.seed = 11;
  return c;
}

TEST(Checkpoint, RoundTripAndCorruption) {
  policy::TeacherModel t(small_teacher(), 1);
  TrainConfig cfg = tiny_config();
  TrainState st = initial_train_state(t.params(), cfg.seed);
  train_teacher(t, kVRPB, cfg, st, 1);
  const Checkpoint ck = make_checkpoint(t, kVRPB, cfg, st);
  const std::vector<char> bytes = encode_checkpoint(ck);
  const Checkpoint back = decode_checkpoint({bytes.data(), bytes.size()});
  EXPECT_EQ(back.task, kVRPB);
  EXPECT_EQ(back.epoch, 1);
  EXPECT_EQ(back.rng, ck.rng);
  EXPECT_EQ(back.adam, ck.adam);
  EXPECT_EQ(back.config_echo, cfg.echo());
  EXPECT_EQ(encode_checkpoint(back), bytes);
  EXPECT_EQ(teacher_from(back).params()[3].value, t.params()[3].value);
  EXPECT_THROW(student_from(back), DataError);

  std::vector<char> bad = bytes;
  bad[2] ^= 1;
  EXPECT_THROW(decode_checkpoint({bad.data(), bad.size()}), DataError);
  EXPECT_THROW(decode_checkpoint({bytes.data(), bytes.size() - 3}), DataError);
  bad = bytes;
  bad[8] = 9;  // version
  EXPECT_THROW(decode_checkpoint({bad.data(), bad.size()}), DataError);
}

TEST(Checkpoint, TeacherResumeIsStepIdentical) {
  const TrainConfig cfg = tiny_config();
  policy::TeacherModel straight(small_teacher(), 1);
  TrainState s1 = initial_train_state(straight.params(), cfg.seed);
  std::vector<double> losses_straight;
  train_teacher(straight, kCVRP, cfg, s1, 7,
                [&](const EpochLog& l) { losses_straight.push_back(l.loss); });

  policy::TeacherModel first(small_teacher(), 1);
  TrainState s2 = initial_train_state(first.params(), cfg.seed);
  train_teacher(first, kCVRP, cfg, s2, 2);
  const std::string path =
      (std::filesystem::temp_directory_path() / "mtlkd_test_resume.ck").string();
  save_checkpoint(path, make_checkpoint(first, kCVRP, cfg, s2));
  const Checkpoint ck = load_checkpoint(path);
  std::filesystem::remove(path);
  policy::TeacherModel resumed = teacher_from(ck);
  TrainState s3 = restore_state(ck);
  std::vector<double> losses_resumed;
  train_teacher(resumed, kCVRP, cfg, s3, 7,
                [&](const EpochLog& l) { losses_resumed.push_back(l.loss); });
  ASSERT_EQ(losses_resumed.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(losses_resumed[i], losses_straight[i + 2]);
  for (std::size_t p = 0; p < straight.params().size(); ++p) {
    EXPECT_EQ(resumed.params()[p].value, straight.params()[p].value);
  }
  EXPECT_EQ(s3.adam, s1.adam);
}

TEST(Checkpoint, StudentResumeIsStepIdentical) {
  TrainConfig cfg = tiny_config();
  cfg.batch_size = 8;
  policy::TeacherModel a(small_teacher(), 5), b(small_teacher(), 6);
  const std::vector<TeacherSlot> slots = {{kCVRP, &a}, {kOVRP, &b}};
  policy::StudentModel straight(small_student(), 1);
  TrainState s1 = initial_train_state(straight.params(), cfg.seed);
  train_student(straight, slots, cfg, s1, 6);

  policy::StudentModel first(small_student(), 1);
  TrainState s2 = initial_train_state(first.params(), cfg.seed);
  train_student(first, slots, cfg, s2, 1);
  const std::vector<char> bytes = encode_checkpoint(make_checkpoint(first, {kCVRP, kOVRP}, cfg, s2));
  const Checkpoint ck = decode_checkpoint({bytes.data(), bytes.size()});
  EXPECT_EQ(ck.tasks, (std::vector<VariantSpec>{kCVRP, kOVRP}));
  policy::StudentModel resumed = student_from(ck);
  TrainState s3 = restore_state(ck);
  train_student(resumed, slots, cfg, s3, 6);
  for (std::size_t p = 0; p < straight.params().size(); ++p) {
    EXPECT_EQ(resumed.params()[p].value, straight.params()[p].value);
  }
}

TEST(Training, BatchSizeMustMatchTasks) {
  TrainConfig cfg = tiny_config();
  policy::TeacherModel a(small_teacher(), 5);
  const std::vector<TeacherSlot> slots = {{kCVRP, &a}, {kOVRP, &a}};
  policy::StudentModel s(small_student(), 1);
  TrainState st = initial_train_state(s.params(), 1);
  EXPECT_THROW(train_student(s, slots, cfg, st, 1), ConfigError);
}

TEST(Training, LogLineFormat) {
  EXPECT_EQ(format_log_line({3, 0.5, 1e-4, 1.25}), "3\t0.5\t0.0001\t1.250");
}

TEST(Training, EpochInstancesArePure) {
  EXPECT_EQ(epoch_instances(kCVRP, 5, 3, 1, 4), epoch_instances(kCVRP, 5, 3, 1, 4));
  EXPECT_NE(epoch_instances(kCVRP, 5, 3, 1, 4), epoch_instances(kCVRP, 5, 3, 1, 5));
  EXPECT_NE(epoch_instances(kCVRP, 5, 3, 1, 4)[0].coords,
            epoch_instances(kOVRP, 5, 3, 1, 4)[0].coords);
}

}  // namespace
}  // namespace mtlkd::train
