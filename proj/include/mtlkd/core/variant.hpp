#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mtlkd {

// Active constraint set of a routing problem. Capacity is always implied, so
// the four optional flags enumerate exactly sixteen variants.
struct VariantSpec {
  bool open = false;
  bool backhaul = false;
  bool duration_limit = false;
  bool time_window = false;

  friend bool operator==(const VariantSpec&, const VariantSpec&) = default;

  // Canonical name, e.g. "CVRP", "OVRPBLTW".
  std::string name() const;

  // Packs the flags into bits 0..3 (O, B, L, TW).
  std::uint8_t bits() const;
  static VariantSpec from_bits(std::uint8_t bits);

  static std::optional<VariantSpec> parse(std::string_view name);

  // Reversing a route preserves cost and feasibility only for closed routes
  // without time windows.
  bool reversal_safe() const { return !open && !time_window; }
};

// All sixteen variants, in the row order of the usual variant table.
const std::array<VariantSpec, 16>& all_variants();

inline constexpr VariantSpec kCVRP{};
inline constexpr VariantSpec kOVRP{.open = true};
inline constexpr VariantSpec kVRPB{.backhaul = true};
inline constexpr VariantSpec kVRPL{.duration_limit = true};
inline constexpr VariantSpec kVRPTW{.time_window = true};
inline constexpr VariantSpec kOVRPTW{.open = true, .time_window = true};

}  // namespace mtlkd
