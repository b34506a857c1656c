#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mtlkd/core/instance.hpp"
#include "mtlkd/core/solution.hpp"

namespace mtlkd {

enum class ViolationCode {
  kOutOfRange,
  kDuplicate,
  kMissing,
  kEmptyRoute,
  kCapacity,
  kTimeWindow,
  kReturnWindow,
  kDuration,
};

std::string_view to_string(ViolationCode c);

struct Violation {
  ViolationCode code;
  int route = -1;  // index into Solution::routes, -1 if not route-specific
  int node = -1;
  std::string detail;
};

struct VerifyReport {
  bool feasible = true;
  std::vector<Violation> violations;

  bool has(ViolationCode c) const;
};

// Checks every active constraint by forward simulation of each route. Shares
// no code with the decoding mask. Never throws; problems are reported.
VerifyReport verify(const Instance& inst, const Solution& sol);

}  // namespace mtlkd
