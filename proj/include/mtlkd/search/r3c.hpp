#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mtlkd/core/instance.hpp"
#include "mtlkd/core/rng.hpp"
#include "mtlkd/core/solution.hpp"
#include "mtlkd/policy/policy.hpp"

namespace mtlkd::search {

// Subtours are the routes of a solution in giant-tour order.
std::vector<Route> split_subtours(const Solution& sol);
Solution join_subtours(std::vector<Route> subtours);

// Uniformly random external order of the subtours.
void reorder_subtours(Solution& sol, Rng& rng);
// Reverses each subtour with probability 1/2 when the variant allows it
// (closed, no time windows); otherwise leaves the solution untouched and
// draws nothing.
void reverse_subtours(Solution& sol, Rng& rng, VariantSpec variant);

// Whole subtours [start, start + count) holding `customers` customers.
struct Segment {
  int start = 0;
  int count = 0;
  int customers = 0;
};

enum class SegmentMode { kRandom, kFixed };
enum class Reoptimizer { kModel, kExact };

struct R3CConfig {
  int iterations = 200;
  SegmentMode mode = SegmentMode::kRandom;
  int fixed_k = 10;
  int min_customers = 4;
  int max_customers = 50;
  bool enable_reorder = true;  // off gives the earlier random re-construct search
  bool enable_reversal = true;
  Reoptimizer reoptimizer = Reoptimizer::kModel;
  std::uint64_t seed = 1;
};

// Random start subtour, then whole subtours forward until the target
// customer count is reached (target ~ U[min, min(n, max)] in random mode,
// fixed_k otherwise). If the tour ends first, earlier subtours are added.
// A segment never exceeds `cap` customers unless its first subtour alone
// does.
Segment sample_segment(const Solution& sol, const R3CConfig& cfg, Rng& rng,
                       int cap = std::numeric_limits<int>::max());

// Standalone instance over the depot and `customers` (renumbered 1..m in
// the given order).
Instance sub_instance(const Instance& inst, const std::vector<int>& customers);

// New routes for the segment's customers (original numbering), verified
// feasible, or nullopt if the re-optimizer cannot handle the segment.
// `model` is required for Reoptimizer::kModel.
std::optional<std::vector<Route>> reoptimize_segment(const Instance& inst, const Solution& sol,
                                                     const Segment& seg, Reoptimizer mode,
                                                     const policy::Policy* model);

struct R3CResult {
  Solution best;
  double objective = 0.0;
  std::vector<double> trace;  // best objective after each iteration
  int accepted = 0;
};

// Throws ContractViolation if `initial` is infeasible or a model is needed
// but missing.
R3CResult r3c_run(const Instance& inst, const Solution& initial, const R3CConfig& cfg,
                  const policy::Policy* model = nullptr);

// "iteration\tbest_objective" lines, iteration 0 being the initial solution.
std::string trace_tsv(double initial_objective, const std::vector<double>& trace);

}  // namespace mtlkd::search
