#include "mtlkd/core/decode.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "mtlkd/core/error.hpp"

namespace mtlkd {

std::string_view to_string(MaskReason r) {
  switch (r) {
    case MaskReason::kOk: return "ok";
    case MaskReason::kVisited: return "visited";
    case MaskReason::kCapacity: return "capacity";
    case MaskReason::kTimeWindow: return "time_window";
    case MaskReason::kReturnWindow: return "return_window";
    case MaskReason::kDuration: return "duration";
    case MaskReason::kDepotRepeat: return "depot_repeat";
  }
  return "?";
}

int FeasibilityMask::allowed_count() const {
  return static_cast<int>(std::count(allowed.begin(), allowed.end(), 1));
}

std::vector<double> FeasibilityMask::additive() const {
  std::vector<double> out(allowed.size());
  for (std::size_t i = 0; i < allowed.size(); ++i) out[i] = allowed[i] ? 0.0 : kMaskedLogit;
  return out;
}

DecodeState initial_state(const Instance& inst) {
  DecodeState s;
  s.visited.assign(inst.num_nodes(), 0);
  s.last = 0;
  s.l_r = inst.capacity;
  s.t_c = 0.0;
  s.d_r = inst.duration_limit;
  s.open = inst.variant.open;
  return s;
}

namespace {

MaskReason check_customer(const Instance& inst, const DecodeState& s, int j) {
  if (s.visited[j]) return MaskReason::kVisited;
  const auto& v = inst.variant;
  const int d = inst.demand[j];
  if (d > 0) {
    if (s.delivered_acc + d > inst.capacity + kFeasSlack) return MaskReason::kCapacity;
  } else {
    if (s.collected_acc - d > inst.capacity + kFeasSlack) return MaskReason::kCapacity;
  }
  const double leg = inst.distance(s.last, j);
  if (v.time_window) {
    const double start = std::max(s.t_c + leg / inst.speed, inst.tw[j].earliest);
    if (start > inst.tw[j].latest + kFeasSlack) return MaskReason::kTimeWindow;
    if (!v.open && start + inst.service_time[j] + inst.travel_time(j, 0) >
                       inst.depot_latest() + kFeasSlack) {
      return MaskReason::kReturnWindow;
    }
  }
  if (v.duration_limit) {
    const double need = leg + (v.open ? 0.0 : inst.distance(j, 0));
    if (need > s.d_r + kFeasSlack) return MaskReason::kDuration;
  }
  return MaskReason::kOk;
}

}  // namespace

FeasibilityMask feasibility_mask(const Instance& inst, const DecodeState& state) {
  const int n = inst.num_nodes();
  FeasibilityMask m;
  m.allowed.assign(n, 0);
  m.reason.assign(n, MaskReason::kOk);
  m.reason[0] = (state.last == 0 || state.done) ? MaskReason::kDepotRepeat : MaskReason::kOk;
  m.allowed[0] = m.reason[0] == MaskReason::kOk;
  for (int j = 1; j < n; ++j) {
    m.reason[j] = check_customer(inst, state, j);
    m.allowed[j] = m.reason[j] == MaskReason::kOk;
  }
  return m;
}

void apply_action(const Instance& inst, DecodeState& s, int action) {
  if (s.done) throw ContractViolation("transition on a finished state");
  if (action < 0 || action >= inst.num_nodes()) {
    throw ContractViolation("transition: action out of range");
  }
  if (action == 0) {
    if (s.last == 0) throw ContractViolation("transition: depot action masked (depot_repeat)");
    s.last = 0;
    s.l_r = inst.capacity;
    s.t_c = 0.0;
    s.d_r = inst.duration_limit;
    s.delivered_acc = 0.0;
    s.collected_acc = 0.0;
    s.route_length = 0.0;
    return;
  }
  const MaskReason r = check_customer(inst, s, action);
  if (r != MaskReason::kOk) {
    throw ContractViolation("transition: action " + std::to_string(action) +
                            " masked (" + std::string(to_string(r)) + ")");
  }
  const double leg = inst.distance(s.last, action);
  const int d = inst.demand[action];
  if (d > 0) {
    s.delivered_acc += d;
  } else {
    s.collected_acc -= d;
  }
  s.l_r = inst.capacity - s.delivered_acc;
  s.t_c = std::max(s.t_c + leg / inst.speed, inst.tw[action].earliest) +
          inst.service_time[action];
  s.route_length += leg;
  s.d_r = inst.duration_limit - s.route_length;
  s.visited[action] = 1;
  s.last = action;
  ++s.num_visited;
  s.done = s.num_visited == inst.num_customers();
}

DecodeState transition(const Instance& inst, const DecodeState& state, int action) {
  DecodeState next = state;
  apply_action(inst, next, action);
  return next;
}

}  // namespace mtlkd
