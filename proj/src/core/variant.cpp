#include "mtlkd/core/variant.hpp"

namespace mtlkd {

std::string VariantSpec::name() const {
  std::string s;
  if (open) s += "O";
  s += "VRP";
  if (backhaul) s += "B";
  if (duration_limit) s += "L";
  if (time_window) s += "TW";
  return s == "VRP" ? "CVRP" : s;
}

std::uint8_t VariantSpec::bits() const {
  return static_cast<std::uint8_t>((open ? 1 : 0) | (backhaul ? 2 : 0) |
                                   (duration_limit ? 4 : 0) |
                                   (time_window ? 8 : 0));
}

VariantSpec VariantSpec::from_bits(std::uint8_t bits) {
  return VariantSpec{.open = (bits & 1) != 0,
                     .backhaul = (bits & 2) != 0,
                     .duration_limit = (bits & 4) != 0,
                     .time_window = (bits & 8) != 0};
}

std::optional<VariantSpec> VariantSpec::parse(std::string_view name) {
  for (const auto& v : all_variants()) {
    if (v.name() == name) return v;
  }
  return std::nullopt;
}

const std::array<VariantSpec, 16>& all_variants() {
  static const std::array<VariantSpec, 16> kAll = [] {
    // Table order: CVRP, OVRP, VRPB, VRPL, VRPTW, OVRPTW, OVRPB, OVRPL, VRPBL,
    // VRPBTW, VRPLTW, OVRPBL, OVRPBTW, OVRPLTW, VRPBLTW, OVRPBLTW.
    constexpr std::uint8_t order[16] = {0, 1, 2, 4, 8, 9, 3, 5,
                                        6, 10, 12, 7, 11, 13, 14, 15};
    std::array<VariantSpec, 16> out{};
    for (int i = 0; i < 16; ++i) out[i] = VariantSpec::from_bits(order[i]);
    return out;
  }();
  return kAll;
}

}  // namespace mtlkd
