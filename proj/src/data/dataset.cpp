#include "mtlkd/data/dataset.hpp"

#include <string>

#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/core/error.hpp"
#include "mtlkd/data/generate.hpp"

namespace mtlkd::data {

Dataset generate_dataset(VariantSpec variant, int n, int count, std::uint64_t seed) {
  Dataset ds;
  ds.header = {variant, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(count), seed,
               kDatasetFormatVersion};
  ds.instances = generate_instances(variant, n, count, seed);
  return ds;
}

std::vector<char> encode_dataset(const Dataset& ds) {
  ByteWriter w;
  w.bytes(std::string_view(kDatasetMagic, 8));
  w.u32(ds.header.format_version);
  w.u8(ds.header.variant.bits());
  w.u32(ds.header.n);
  w.u32(static_cast<std::uint32_t>(ds.instances.size()));
  w.u64(ds.header.seed);
  for (const auto& inst : ds.instances) {
    w.str(inst.name);
    w.u32(static_cast<std::uint32_t>(inst.num_nodes()));
    w.f64(inst.capacity);
    w.f64(inst.duration_limit);
    w.f64(inst.speed);
    w.f64(inst.distance_scale);
    for (int i = 0; i < inst.num_nodes(); ++i) {
      w.f64(inst.coords[i].x);
      w.f64(inst.coords[i].y);
      w.i32(inst.demand[i]);
      w.f64(inst.service_time[i]);
      w.f64(inst.tw[i].earliest);
      w.f64(inst.tw[i].latest);
    }
  }
  return w.data();
}

Dataset decode_dataset(std::string_view bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 8 || r.bytes(8) != std::string_view(kDatasetMagic, 8)) {
    throw DataError("not a dataset file (bad magic)");
  }
  Dataset ds;
  ds.header.format_version = r.u32();
  if (ds.header.format_version != kDatasetFormatVersion) {
    throw DataError("unsupported dataset version " + std::to_string(ds.header.format_version));
  }
  const std::uint8_t bits = r.u8();
  if (bits > 15) throw DataError("bad variant bits in dataset header");
  ds.header.variant = VariantSpec::from_bits(bits);
  ds.header.n = r.u32();
  ds.header.count = r.u32();
  ds.header.seed = r.u64();
  ds.instances.reserve(ds.header.count);
  for (std::uint32_t k = 0; k < ds.header.count; ++k) {
    Instance inst;
    inst.variant = ds.header.variant;
    inst.name = r.str();
    const auto nodes = r.u32();
    if (nodes > r.remaining()) throw DataError("dataset record claims too many nodes");
    inst.capacity = r.f64();
    inst.duration_limit = r.f64();
    inst.speed = r.f64();
    inst.distance_scale = r.f64();
    inst.coords.resize(nodes);
    inst.demand.resize(nodes);
    inst.service_time.resize(nodes);
    inst.tw.resize(nodes);
    for (std::uint32_t i = 0; i < nodes; ++i) {
      inst.coords[i].x = r.f64();
      inst.coords[i].y = r.f64();
      inst.demand[i] = r.i32();
      inst.service_time[i] = r.f64();
      inst.tw[i].earliest = r.f64();
      inst.tw[i].latest = r.f64();
    }
    inst.validate();
    ds.instances.push_back(std::move(inst));
  }
  if (!r.at_end()) throw DataError("trailing bytes after dataset records");
  return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  write_file(path, encode_dataset(ds));
}

Dataset load_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

}  // namespace mtlkd::data
