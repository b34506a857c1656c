#include "mtlkd/search/r3c.hpp"

#include <algorithm>
#include <cstdio>

#include "mtlkd/core/error.hpp"
#include "mtlkd/core/verify.hpp"
#include "mtlkd/search/exact.hpp"

namespace mtlkd::search {

std::vector<Route> split_subtours(const Solution& sol) { return sol.routes; }

Solution join_subtours(std::vector<Route> subtours) { return Solution{std::move(subtours)}; }

void reorder_subtours(Solution& sol, Rng& rng) { rng.shuffle(sol.routes); }

void reverse_subtours(Solution& sol, Rng& rng, VariantSpec variant) {
  if (!variant.reversal_safe()) return;
  for (auto& r : sol.routes) {
    if (rng.uniform() < 0.5) std::reverse(r.begin(), r.end());
  }
}

Segment sample_segment(const Solution& sol, const R3CConfig& cfg, Rng& rng, int cap) {
  const int m = static_cast<int>(sol.routes.size());
  if (m == 0) throw ContractViolation("sample_segment: empty solution");
  const int n = sol.num_customers();
  int target;
  if (cfg.mode == SegmentMode::kRandom) {
    const int lo = std::min(cfg.min_customers, n);
    const int hi = std::max(lo, std::min(n, cfg.max_customers));
    target = static_cast<int>(rng.uniform_int(lo, hi));
  } else {
    target = std::min(cfg.fixed_k, n);
  }
  const int start = static_cast<int>(rng.uniform_int(0, m - 1));
  Segment seg{start, 1, static_cast<int>(sol.routes[start].size())};
  while (seg.customers < target) {
    const int end = seg.start + seg.count;
    int add;
    if (end < m) {
      add = static_cast<int>(sol.routes[end].size());
      if (seg.customers + add > cap) break;
    } else if (seg.start > 0) {
      add = static_cast<int>(sol.routes[seg.start - 1].size());
      if (seg.customers + add > cap) break;
      --seg.start;
    } else {
      break;
    }
    ++seg.count;
    seg.customers += add;
  }
  return seg;
}

Instance sub_instance(const Instance& inst, const std::vector<int>& customers) {
  Instance sub;
  sub.name = inst.name + ".segment";
  sub.variant = inst.variant;
  sub.capacity = inst.capacity;
  sub.duration_limit = inst.duration_limit;
  sub.speed = inst.speed;
  sub.distance_scale = inst.distance_scale;
  auto take = [&](int i) {
    sub.coords.push_back(inst.coords[i]);
    sub.demand.push_back(inst.demand[i]);
    sub.service_time.push_back(inst.service_time[i]);
    sub.tw.push_back(inst.tw[i]);
  };
  take(0);
  for (int c : customers) take(c);
  return sub;
}

std::optional<std::vector<Route>> reoptimize_segment(const Instance& inst, const Solution& sol,
                                                     const Segment& seg, Reoptimizer mode,
                                                     const policy::Policy* model) {
  std::vector<int> customers;
  for (int r = seg.start; r < seg.start + seg.count; ++r) {
    customers.insert(customers.end(), sol.routes[r].begin(), sol.routes[r].end());
  }
  const Instance sub = sub_instance(inst, customers);
  Solution local;
  if (mode == Reoptimizer::kExact) {
    if (static_cast<int>(customers.size()) > kExactMaxCustomers) return std::nullopt;
    local = exact_solve(sub).solution;
  } else {
    if (model == nullptr) throw ContractViolation("model re-optimizer needs a policy");
    Rng unused(0);
    local = policy::construct_with(*model, sub, unused).solution;
  }
  if (!verify(sub, local).feasible) return std::nullopt;
  for (auto& r : local.routes) {
    for (int& c : r) c = customers[c - 1];
  }
  return std::move(local.routes);
}

R3CResult r3c_run(const Instance& inst, const Solution& initial, const R3CConfig& cfg,
                  const policy::Policy* model) {
  if (!verify(inst, initial).feasible) throw ContractViolation("r3c: initial solution infeasible");
  if (cfg.reoptimizer == Reoptimizer::kModel && model == nullptr) {
    throw ContractViolation("r3c: model re-optimizer needs a policy");
  }
  const int cap =
      cfg.reoptimizer == Reoptimizer::kExact ? kExactMaxCustomers : std::numeric_limits<int>::max();
  Rng rng(cfg.seed);
  R3CResult res;
  res.best = initial;
  res.objective = evaluate(inst, initial);
  res.trace.reserve(cfg.iterations);
  for (int it = 0; it < cfg.iterations; ++it) {
    if (cfg.enable_reorder) reorder_subtours(res.best, rng);
    if (cfg.enable_reversal) reverse_subtours(res.best, rng, inst.variant);
    const Segment seg = sample_segment(res.best, cfg, rng, cap);
    if (auto routes = reoptimize_segment(inst, res.best, seg, cfg.reoptimizer, model)) {
      Solution cand;
      const auto& cur = res.best.routes;
      cand.routes.assign(cur.begin(), cur.begin() + seg.start);
      cand.routes.insert(cand.routes.end(), routes->begin(), routes->end());
      cand.routes.insert(cand.routes.end(), cur.begin() + seg.start + seg.count, cur.end());
      const double obj = evaluate(inst, cand);
      if (obj < res.objective - 1e-9) {
        res.best = std::move(cand);
        res.objective = obj;
        ++res.accepted;
      }
    }
    res.trace.push_back(res.objective);
  }
  return res;
}

std::string trace_tsv(double initial_objective, const std::vector<double>& trace) {
  std::string out = "iteration\tbest_objective\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "0\t%.9f\n", initial_objective);
  out += buf;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu\t%.9f\n", i + 1, trace[i]);
    out += buf;
  }
  return out;
}

}  // namespace mtlkd::search
