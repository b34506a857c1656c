#include "mtlkd/search/exact.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mtlkd/core/error.hpp"
#include "mtlkd/core/verify.hpp"

namespace mtlkd::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Label {
  double dist;
  double time;  // service completion at the last customer
  int prev_last;
  int prev_label;
};

}  // namespace

ExactResult exact_solve(const Instance& inst) {
  const int n = inst.num_customers();
  if (n > kExactMaxCustomers) {
    throw ContractViolation("exact_solve supports at most " +
                            std::to_string(kExactMaxCustomers) + " customers");
  }
  ExactResult out;
  if (n == 0) return out;

  const VariantSpec v = inst.variant;
  const int full = (1 << n) - 1;
  const double depot_latest = inst.depot_latest();

  // Subset loads decide capacity feasibility once per subset.
  std::vector<char> load_ok(full + 1, 1);
  for (int s = 1; s <= full; ++s) {
    double line = 0, back = 0;
    for (int c = 0; c < n; ++c) {
      if (!(s >> c & 1)) continue;
      const int d = inst.demand[c + 1];
      (d >= 0 ? line : back) += std::abs(d);
    }
    load_ok[s] = line <= inst.capacity + kFeasSlack && back <= inst.capacity + kFeasSlack;
  }

  // Labels for (subset, last customer), stored at s * n + last.
  std::vector<std::vector<Label>> labels(static_cast<std::size_t>(full + 1) * n);
  auto can_close = [&](int last, const Label& l) {
    if (v.open) return true;
    const double back = inst.distance(last + 1, 0);
    if (v.time_window && l.time + back > depot_latest + kFeasSlack) return false;
    if (v.duration_limit && l.dist + back > inst.duration_limit + kFeasSlack) return false;
    return true;
  };
  auto insert_label = [](std::vector<Label>& set, const Label& l) {
    for (const auto& o : set) {
      if (o.dist <= l.dist && o.time <= l.time) return;
    }
    std::erase_if(set, [&](const Label& o) { return l.dist <= o.dist && l.time <= o.time; });
    set.push_back(l);
  };
  auto extend = [&](int last, const Label& from, int next, int prev_last, int prev_label,
                    Label& to) {
    const double leg = inst.distance(last < 0 ? 0 : last + 1, next + 1);
    to.dist = from.dist + leg;
    to.time = 0.0;
    if (v.time_window) {
      const double start = std::max(from.time + inst.travel_time(last < 0 ? 0 : last + 1, next + 1),
                                    inst.tw[next + 1].earliest);
      if (start > inst.tw[next + 1].latest + kFeasSlack) return false;
      to.time = start + inst.service_time[next + 1];
    }
    if (v.duration_limit && to.dist > inst.duration_limit + kFeasSlack) return false;
    to.prev_last = prev_last;
    to.prev_label = prev_label;
    return can_close(next, to);
  };

  const Label origin{0.0, 0.0, -1, -1};
  for (int c = 0; c < n; ++c) {
    if (!load_ok[1 << c]) continue;
    Label l;
    if (extend(-1, origin, c, -1, -1, l)) labels[static_cast<std::size_t>(1 << c) * n + c].push_back(l);
  }
  for (int s = 1; s <= full; ++s) {
    for (int last = 0; last < n; ++last) {
      const auto& set = labels[static_cast<std::size_t>(s) * n + last];
      for (int li = 0; li < static_cast<int>(set.size()); ++li) {
        for (int next = 0; next < n; ++next) {
          if (s >> next & 1) continue;
          const int t = s | (1 << next);
          if (!load_ok[t]) continue;
          Label l;
          if (extend(last, set[li], next, last, li, l)) {
            insert_label(labels[static_cast<std::size_t>(t) * n + next], l);
          }
        }
      }
    }
  }

  // Cheapest closed (or open) route per subset.
  std::vector<double> route_best(full + 1, kInf);
  std::vector<std::pair<int, int>> route_end(full + 1, {-1, -1});
  for (int s = 1; s <= full; ++s) {
    for (int last = 0; last < n; ++last) {
      const auto& set = labels[static_cast<std::size_t>(s) * n + last];
      for (int li = 0; li < static_cast<int>(set.size()); ++li) {
        const double cost = set[li].dist + (v.open ? 0.0 : inst.distance(last + 1, 0));
        if (cost < route_best[s]) {
          route_best[s] = cost;
          route_end[s] = {last, li};
        }
      }
    }
  }

  // Partition DP; each split takes the part holding the lowest customer.
  std::vector<double> best(full + 1, kInf);
  std::vector<int> choice(full + 1, 0);
  best[0] = 0.0;
  for (int s = 1; s <= full; ++s) {
    const int low = s & -s;
    const int rest = s ^ low;
    for (int sub = rest;; sub = (sub - 1) & rest) {
      const int part = sub | low;
      if (route_best[part] < kInf && best[s ^ part] < kInf) {
        const double c = route_best[part] + best[s ^ part];
        if (c < best[s]) {
          best[s] = c;
          choice[s] = part;
        }
      }
      if (sub == 0) break;
    }
  }
  if (!(best[full] < kInf)) throw std::runtime_error("exact_solve: no feasible solution");

  for (int s = full; s != 0; s ^= choice[s]) {
    const int part = choice[s];
    Route route;
    auto [last, li] = route_end[part];
    int subset = part;
    while (last >= 0) {
      route.push_back(last + 1);
      const Label& l = labels[static_cast<std::size_t>(subset) * n + last][li];
      subset ^= 1 << last;
      last = l.prev_last;
      li = l.prev_label;
    }
    std::reverse(route.begin(), route.end());
    out.solution.routes.push_back(std::move(route));
  }
  if (!verify(inst, out.solution).feasible) {
    throw std::runtime_error("exact_solve: reconstructed solution failed verification");
  }
  out.objective = evaluate(inst, out.solution);
  return out;
}

}  // namespace mtlkd::search
