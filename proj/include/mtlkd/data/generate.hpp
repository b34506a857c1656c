#pragma once

#include <cstdint>
#include <vector>

#include "mtlkd/core/instance.hpp"
#include "mtlkd/core/rng.hpp"
#include "mtlkd/core/variant.hpp"

namespace mtlkd::data {

inline constexpr double kBackhaulFraction = 0.2;
inline constexpr double kMinWindowWidth = 0.15;
inline constexpr double kMaxWindowWidth = 0.75;

// Random instance: coordinates U[0,1)^2, linehaul demands U{1..9}, exactly
// round(0.2 n) backhauls with demands U{-9..-1} when the variant has them,
// capacity 50, duration limit 3, and (for TW variants) windows sampled so that
// depot -> i -> depot is always feasible. Pure function of its arguments.
Instance generate_instance(VariantSpec variant, int n, std::uint64_t seed);

// Same, drawing from an explicit generator.
Instance generate_instance(VariantSpec variant, int n, Rng& rng);

// `count` instances; instance k draws from sub-stream k of `seed`.
std::vector<Instance> generate_instances(VariantSpec variant, int n, int count,
                                         std::uint64_t seed);

}  // namespace mtlkd::data
