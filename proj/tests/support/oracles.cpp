#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mtlkd/core/decode.hpp"

namespace mtlkd::testing {

namespace {

double dist(const Instance& inst, int i, int j) {
  const double dx = inst.coords[i].x - inst.coords[j].x;
  const double dy = inst.coords[i].y - inst.coords[j].y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

Instance hand_instance(VariantSpec v, std::vector<Point> coords, std::vector<int> customer_demand) {
  Instance inst;
  inst.name = "hand";
  inst.variant = v;
  inst.coords = std::move(coords);
  inst.demand.push_back(0);
  inst.demand.insert(inst.demand.end(), customer_demand.begin(), customer_demand.end());
  inst.service_time.assign(inst.coords.size(), 0.0);
  inst.tw.assign(inst.coords.size(), TimeWindow{0.0, kDepotHorizon});
  return inst;
}

RouteCheck check_route(const Instance& inst, const std::vector<int>& route) {
  constexpr double eps = 1e-9;
  const VariantSpec v = inst.variant;
  double line = 0, back = 0, length = 0, time = 0;
  int prev = 0;
  for (int c : route) {
    const double leg = dist(inst, prev, c);
    length += leg;
    if (inst.demand[c] >= 0) {
      line += inst.demand[c];
    } else {
      back -= inst.demand[c];
    }
    if (v.time_window) {
      time = std::max(time + leg, inst.tw[c].earliest);
      if (time > inst.tw[c].latest + eps) return {};
      time += inst.service_time[c];
    }
    prev = c;
  }
  if (line > inst.capacity + eps || back > inst.capacity + eps) return {};
  if (!v.open) {
    const double leg = dist(inst, prev, 0);
    length += leg;
    if (v.time_window && time + leg > inst.tw[0].latest + eps) return {};
  }
  if (v.duration_limit && length > inst.duration_limit + eps) return {};
  return {true, length};
}

Enumerated enumerate_optimum(const Instance& inst) {
  const int n = inst.num_customers();
  Enumerated best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> routes;

  // Customer c joins an existing route at any position or opens a new one.
  // Insertion never makes a route feasible again, so infeasible branches are
  // cut immediately.
  std::function<void(int)> rec = [&](int c) {
    if (c > n) {
      double total = 0;
      for (const auto& r : routes) total += check_route(inst, r).cost;
      ++best.feasible_count;
      if (total < best.cost - 1e-12) {
        best.cost = total;
        best.solution.routes = routes;
      }
      return;
    }
    for (std::size_t r = 0; r < routes.size(); ++r) {
      for (std::size_t pos = 0; pos <= routes[r].size(); ++pos) {
        routes[r].insert(routes[r].begin() + pos, c);
        if (check_route(inst, routes[r]).feasible) rec(c + 1);
        routes[r].erase(routes[r].begin() + pos);
      }
    }
    routes.push_back({c});
    if (check_route(inst, routes.back()).feasible) rec(c + 1);
    routes.pop_back();
  };
  rec(1);
  return best;
}

Solution nearest_neighbor(const Instance& inst) {
  DecodeState s = initial_state(inst);
  std::vector<int> actions;
  while (!s.done) {
    const FeasibilityMask m = feasibility_mask(inst, s);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < inst.num_nodes(); ++j) {
      if (!m.allowed[j]) continue;
      const double d = dist(inst, s.last, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    actions.push_back(best);
    apply_action(inst, s, best);
  }
  return Solution::from_actions(actions);
}

}  // namespace mtlkd::testing
