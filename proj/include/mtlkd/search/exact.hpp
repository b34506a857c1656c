#pragma once

#include "mtlkd/core/instance.hpp"
#include "mtlkd/core/solution.hpp"

namespace mtlkd::search {

inline constexpr int kExactMaxCustomers = 12;

struct ExactResult {
  Solution solution;
  double objective = 0.0;
};

// Optimal solution by dynamic programming: non-dominated (distance, time)
// labels per (customer subset, last customer) give the cheapest feasible
// route over every subset, then a partition DP combines routes. Covers all
// 16 variants. Throws ContractViolation above kExactMaxCustomers customers
// and std::runtime_error if the result fails verify().
ExactResult exact_solve(const Instance& inst);

}  // namespace mtlkd::search
