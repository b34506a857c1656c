#include "mtlkd/core/solution.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "mtlkd/core/error.hpp"

namespace mtlkd {
namespace {

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

int Solution::num_customers() const {
  int total = 0;
  for (const auto& r : routes) total += static_cast<int>(r.size());
  return total;
}

std::string Solution::giant_tour() const {
  std::string out = "0";
  for (const auto& r : routes) {
    for (int c : r) out += " " + std::to_string(c);
    out += " 0";
  }
  return out;
}

Solution Solution::from_giant_tour(std::string_view text) {
  std::vector<int> actions;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                 text[pos] == '\n' || text[pos] == '\r')) {
      ++pos;
    }
    if (pos >= text.size()) break;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc{} || value < 0) {
      throw DataError("giant tour: bad token at offset " + std::to_string(pos));
    }
    actions.push_back(value);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  return from_actions(actions);
}

Solution Solution::from_actions(const std::vector<int>& actions) {
  Solution sol;
  Route current;
  for (int a : actions) {
    if (a == 0) {
      if (!current.empty()) sol.routes.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(a);
    }
  }
  if (!current.empty()) sol.routes.push_back(std::move(current));
  return sol;
}

double route_cost(const Instance& inst, const Route& route) {
  if (route.empty()) return 0.0;
  std::vector<double> legs;
  legs.reserve(route.size() + 1);
  int prev = 0;
  for (int c : route) {
    legs.push_back(inst.distance(prev, c));
    prev = c;
  }
  if (!inst.variant.open) legs.push_back(inst.distance(prev, 0));
  return sorted_sum(legs);
}

void check_partition(const Instance& inst, const Solution& sol) {
  const int n = inst.num_customers();
  std::vector<char> seen(n + 1, 0);
  int count = 0;
  for (const auto& r : sol.routes) {
    if (r.empty()) throw ContractViolation("solution contains an empty route");
    for (int c : r) {
      if (c < 1 || c > n) {
        throw ContractViolation("solution references node " + std::to_string(c));
      }
      if (seen[c]) throw ContractViolation("customer " + std::to_string(c) + " duplicated");
      seen[c] = 1;
      ++count;
    }
  }
  if (count != n) throw ContractViolation("solution is missing customers");
}

double evaluate(const Instance& inst, const Solution& sol) {
  check_partition(inst, sol);
  std::vector<double> costs;
  costs.reserve(sol.routes.size());
  for (const auto& r : sol.routes) costs.push_back(route_cost(inst, r));
  return sorted_sum(costs);
}

}  // namespace mtlkd
