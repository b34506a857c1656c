#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mtlkd/core/rng.hpp"
#include "mtlkd/core/variant.hpp"
#include "mtlkd/nk/adam.hpp"
#include "mtlkd/policy/student.hpp"
#include "mtlkd/policy/teacher.hpp"

namespace mtlkd::train {

inline constexpr char kCheckpointMagic[] = "MTLKDCK1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class ModelKind : std::uint8_t { kTeacher = 1, kStudent = 2 };

struct Checkpoint {
  ModelKind kind = ModelKind::kTeacher;
  VariantSpec task;                // teacher task
  std::vector<VariantSpec> tasks;  // student: seen tasks
  policy::TeacherConfig teacher_config;
  policy::StudentConfig student_config;
  std::string config_echo;  // training config as key=value lines
  nk::ParameterStore params;
  nk::AdamState adam;
  int epoch = 0;  // epochs completed
  Rng::Cursor rng;
};

std::vector<char> encode_checkpoint(const Checkpoint& ck);
// Throws DataError on bad magic, unknown version or truncation.
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

// Models rebuilt from a checkpoint; throws DataError on a kind or layout
// mismatch.
policy::TeacherModel teacher_from(const Checkpoint& ck);
policy::StudentModel student_from(const Checkpoint& ck);

}  // namespace mtlkd::train
