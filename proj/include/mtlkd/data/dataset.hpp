#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtlkd/core/instance.hpp"
#include "mtlkd/core/variant.hpp"

namespace mtlkd::data {

inline constexpr char kDatasetMagic[] = "MTLKDDS1";
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

struct DatasetHeader {
  VariantSpec variant;
  std::uint32_t n = 0;
  std::uint32_t count = 0;
  std::uint64_t seed = 0;
  std::uint32_t format_version = kDatasetFormatVersion;
  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

struct Dataset {
  DatasetHeader header;
  std::vector<Instance> instances;
};

// Regenerates the dataset described by a header (same header, same bytes).
Dataset generate_dataset(VariantSpec variant, int n, int count, std::uint64_t seed);

// Binary layout, all little-endian:
//   "MTLKDDS1" | u32 version | u8 variant bits | u32 n | u32 count | u64 seed
//   then `count` records:
//   str name | u32 nodes | f64 capacity, duration_limit, speed, distance_scale
//   | nodes x (f64 x, f64 y, i32 demand, f64 service, f64 earliest, f64 latest)
std::vector<char> encode_dataset(const Dataset& ds);
Dataset decode_dataset(std::string_view bytes);

void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);

}  // namespace mtlkd::data
