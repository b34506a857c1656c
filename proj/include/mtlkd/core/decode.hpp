#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mtlkd/core/instance.hpp"

namespace mtlkd {

// Partial-solution state of autoregressive construction. Single writer.
struct DecodeState {
  std::vector<char> visited;  // per node; the depot entry stays 0
  int last = 0;
  double l_r = 0.0;  // remaining linehaul capacity
  double t_c = 0.0;  // service completion time at `last`
  double d_r = 0.0;  // remaining route distance budget
  bool open = false;
  double delivered_acc = 0.0;  // linehaul demand served on the current route
  double collected_acc = 0.0;  // |backhaul| demand served on the current route
  double route_length = 0.0;   // distance travelled on the current route
  int num_visited = 0;
  bool done = false;

  int unvisited_count() const {
    return static_cast<int>(visited.size()) - 1 - num_visited;
  }

  friend bool operator==(const DecodeState&, const DecodeState&) = default;
};

enum class MaskReason : std::uint8_t {
  kOk,
  kVisited,
  kCapacity,
  kTimeWindow,
  kReturnWindow,
  kDuration,
  kDepotRepeat,
};

std::string_view to_string(MaskReason r);

inline constexpr double kMaskedLogit = -1e30;

struct FeasibilityMask {
  std::vector<char> allowed;
  std::vector<MaskReason> reason;

  int allowed_count() const;
  // Additive form: 0 for allowed nodes, kMaskedLogit otherwise.
  std::vector<double> additive() const;
};

DecodeState initial_state(const Instance& inst);

FeasibilityMask feasibility_mask(const Instance& inst, const DecodeState& state);

// Applies `action`. Throws ContractViolation if the action is masked or the
// state is already done.
DecodeState transition(const Instance& inst, const DecodeState& state, int action);

// In-place variant used by hot loops; same contract as transition().
void apply_action(const Instance& inst, DecodeState& state, int action);

}  // namespace mtlkd
