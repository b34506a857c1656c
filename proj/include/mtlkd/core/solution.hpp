#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mtlkd/core/instance.hpp"

namespace mtlkd {

using Route = std::vector<int>;

// Customers partitioned into ordered, non-empty routes.
struct Solution {
  std::vector<Route> routes;

  int num_customers() const;

  // Canonical giant-tour text form, e.g. "0 3 1 0 2 0".
  std::string giant_tour() const;
  // Parses the giant-tour form. Consecutive depots are collapsed.
  static Solution from_giant_tour(std::string_view text);
  // Splits a construction action sequence at depot visits.
  static Solution from_actions(const std::vector<int>& actions);

  friend bool operator==(const Solution&, const Solution&) = default;
};

// Length of one route: depot -> c1 -> ... -> ck, plus ck -> depot when closed.
// Legs are summed in sorted order so the result does not depend on the
// direction of traversal.
double route_cost(const Instance& inst, const Route& route);

// Total travel distance. Route costs are summed in sorted order, so the value
// is bit-identical under any permutation of the routes. Throws
// ContractViolation if the solution is not a partition of the customers.
double evaluate(const Instance& inst, const Solution& sol);

// Throws ContractViolation unless `sol` visits every customer exactly once in
// non-empty routes.
void check_partition(const Instance& inst, const Solution& sol);

}  // namespace mtlkd
