#include "mtlkd/train/checkpoint.hpp"

#include <cstring>

#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/core/error.hpp"
#include "mtlkd/nk/serialize.hpp"

namespace mtlkd::train {

namespace {

// Parameter names and shapes, followed by values, so a reader can rebuild
// the store without constructing the model first.
void write_store(ByteWriter& w, const nk::ParameterStore& store) {
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& p : store.all()) {
    w.str(p.name);
    nk::write_tensor(w, p.value);
  }
}

nk::ParameterStore read_store(ByteReader& r) {
  nk::ParameterStore store;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    store.add(std::move(name), nk::read_tensor(r));
  }
  return store;
}

}  // namespace

std::vector<char> encode_checkpoint(const Checkpoint& ck) {
  ByteWriter w;
  w.bytes({kCheckpointMagic, 8});
  w.u32(kCheckpointVersion);
  w.u8(static_cast<std::uint8_t>(ck.kind));
  w.u8(ck.task.bits());
  w.u32(static_cast<std::uint32_t>(ck.tasks.size()));
  for (const auto& t : ck.tasks) w.u8(t.bits());
  const auto& tc = ck.teacher_config;
  for (int v : {tc.encoder_layers, tc.decoder_layers, tc.embed_dim, tc.heads, tc.ff_hidden}) {
    w.i32(v);
  }
  w.f64(tc.logit_clip);
  const auto& sc = ck.student_config;
  for (int v : {sc.encoder_layers, sc.decoder_layers, sc.embed_dim, sc.heads, sc.ff_hidden}) {
    w.i32(v);
  }
  w.u8(sc.layer_norm_in_attention ? 1 : 0);
  w.str(ck.config_echo);
  write_store(w, ck.params);
  nk::write_adam(w, ck.adam);
  w.i32(ck.epoch);
  w.u64(ck.rng.seed);
  w.u64(ck.rng.stream);
  w.u64(ck.rng.block);
  w.u32(ck.rng.lane);
  return w.data();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  r.bytes(8);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  const std::uint8_t kind = r.u8();
  if (kind != 1 && kind != 2) throw DataError("bad checkpoint model kind");
  ck.kind = static_cast<ModelKind>(kind);
  ck.task = VariantSpec::from_bits(r.u8());
  const std::uint32_t ntasks = r.u32();
  if (ntasks > 16) throw DataError("bad checkpoint task count");
  for (std::uint32_t i = 0; i < ntasks; ++i) ck.tasks.push_back(VariantSpec::from_bits(r.u8()));
  auto& tc = ck.teacher_config;
  for (int* v : {&tc.encoder_layers, &tc.decoder_layers, &tc.embed_dim, &tc.heads, &tc.ff_hidden}) {
    *v = r.i32();
  }
  tc.logit_clip = r.f64();
  auto& sc = ck.student_config;
  for (int* v : {&sc.encoder_layers, &sc.decoder_layers, &sc.embed_dim, &sc.heads, &sc.ff_hidden}) {
    *v = r.i32();
  }
  sc.layer_norm_in_attention = r.u8() != 0;
  ck.config_echo = r.str();
  ck.params = read_store(r);
  ck.adam = nk::read_adam(r);
  ck.epoch = r.i32();
  ck.rng.seed = r.u64();
  ck.rng.stream = r.u64();
  ck.rng.block = r.u64();
  ck.rng.lane = r.u32();
  if (ck.rng.lane > 4) throw DataError("bad checkpoint RNG cursor");
  if (r.remaining() != 0) throw DataError("trailing bytes in checkpoint");
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  write_file(path, encode_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path));
}

namespace {

template <typename Model>
void load_params(Model& model, const nk::ParameterStore& params) {
  if (!model.params().same_layout(params)) {
    throw DataError("checkpoint parameters do not match the model layout");
  }
  model.params() = params;
}

}  // namespace

policy::TeacherModel teacher_from(const Checkpoint& ck) {
  if (ck.kind != ModelKind::kTeacher) throw DataError("checkpoint holds a student, not a teacher");
  policy::TeacherModel m(ck.teacher_config, 0);
  load_params(m, ck.params);
  return m;
}

policy::StudentModel student_from(const Checkpoint& ck) {
  if (ck.kind != ModelKind::kStudent) throw DataError("checkpoint holds a teacher, not a student");
  policy::StudentModel m(ck.student_config, 0);
  load_params(m, ck.params);
  return m;
}

}  // namespace mtlkd::train
