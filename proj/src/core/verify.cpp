#include "mtlkd/core/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mtlkd {

std::string_view to_string(ViolationCode c) {
  switch (c) {
    case ViolationCode::kOutOfRange: return "out_of_range";
    case ViolationCode::kDuplicate: return "duplicate";
    case ViolationCode::kMissing: return "missing";
    case ViolationCode::kEmptyRoute: return "empty_route";
    case ViolationCode::kCapacity: return "capacity";
    case ViolationCode::kTimeWindow: return "time_window";
    case ViolationCode::kReturnWindow: return "return_window";
    case ViolationCode::kDuration: return "duration";
  }
  return "?";
}

bool VerifyReport::has(ViolationCode c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [c](const Violation& v) { return v.code == c; });
}

namespace {

double euclid(const Instance& inst, int i, int j) {
  return std::hypot(inst.coords[i].x - inst.coords[j].x, inst.coords[i].y - inst.coords[j].y);
}

}  // namespace

VerifyReport verify(const Instance& inst, const Solution& sol) {
  VerifyReport rep;
  auto add = [&rep](ViolationCode code, int route, int node, std::string detail) {
    rep.feasible = false;
    rep.violations.push_back({code, route, node, std::move(detail)});
  };

  const int n = inst.num_customers();
  std::vector<int> seen(n + 1, 0);
  for (int r = 0; r < static_cast<int>(sol.routes.size()); ++r) {
    const auto& route = sol.routes[r];
    if (route.empty()) add(ViolationCode::kEmptyRoute, r, -1, "route has no customers");
    bool bad_index = false;
    for (int c : route) {
      if (c < 1 || c > n) {
        add(ViolationCode::kOutOfRange, r, c, "not a customer index");
        bad_index = true;
      } else if (seen[c]++ > 0) {
        add(ViolationCode::kDuplicate, r, c, "customer visited twice");
      }
    }
    if (bad_index || route.empty()) continue;

    const auto& v = inst.variant;
    double delivered = 0.0;
    double collected = 0.0;
    double length = 0.0;
    double clock = 0.0;
    int at = 0;
    for (int c : route) {
      const double leg = euclid(inst, at, c);
      length += leg;
      if (inst.demand[c] > 0) {
        delivered += inst.demand[c];
      } else {
        collected += -inst.demand[c];
      }
      if (v.time_window) {
        const double arrival = clock + leg / inst.speed;
        if (arrival > inst.tw[c].latest + kFeasSlack) {
          add(ViolationCode::kTimeWindow, r, c,
              "arrival " + std::to_string(arrival) + " after latest " +
                  std::to_string(inst.tw[c].latest));
        }
        clock = std::max(arrival, inst.tw[c].earliest) + inst.service_time[c];
      }
      at = c;
    }
    if (!v.open) {
      const double back = euclid(inst, at, 0);
      length += back;
      if (v.time_window && clock + back / inst.speed > inst.tw[0].latest + kFeasSlack) {
        add(ViolationCode::kReturnWindow, r, at, "returns to depot after its window");
      }
    }
    if (delivered > inst.capacity + kFeasSlack) {
      add(ViolationCode::kCapacity, r, -1, "linehaul load " + std::to_string(delivered));
    }
    if (v.backhaul && collected > inst.capacity + kFeasSlack) {
      add(ViolationCode::kCapacity, r, -1, "backhaul load " + std::to_string(collected));
    }
    if (v.duration_limit && length > inst.duration_limit + kFeasSlack) {
      add(ViolationCode::kDuration, r, -1, "route length " + std::to_string(length));
    }
  }
  for (int c = 1; c <= n; ++c) {
    if (seen[c] == 0) add(ViolationCode::kMissing, -1, c, "customer never visited");
  }
  return rep;
}

}  // namespace mtlkd
