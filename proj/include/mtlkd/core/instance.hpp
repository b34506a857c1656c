#pragma once

#include <string>
#include <vector>

#include "mtlkd/core/variant.hpp"

namespace mtlkd {

inline constexpr double kDefaultCapacity = 50.0;
inline constexpr double kDefaultDurationLimit = 3.0;
inline constexpr double kDefaultServiceTime = 0.2;
inline constexpr double kDepotHorizon = 3.0;
// Absolute slack for every feasibility comparison.
inline constexpr double kFeasSlack = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct TimeWindow {
  double earliest = 0.0;
  double latest = 0.0;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// A routing instance. Node 0 is the depot; nodes 1..n are customers.
// Treated as an immutable value once built.
struct Instance {
  std::string name;
  VariantSpec variant;
  std::vector<Point> coords;
  std::vector<int> demand;  // signed; backhauls are negative
  std::vector<double> service_time;
  std::vector<TimeWindow> tw;
  double capacity = kDefaultCapacity;
  double duration_limit = kDefaultDurationLimit;
  double speed = 1.0;
  // Native units per model length unit; 1 for generated instances.
  double distance_scale = 1.0;

  int num_nodes() const { return static_cast<int>(coords.size()); }
  int num_customers() const { return num_nodes() - 1; }

  // Euclidean distance; throws ContractViolation on a bad index.
  double distance(int i, int j) const;
  double travel_time(int i, int j) const { return distance(i, j) / speed; }

  double depot_latest() const { return tw.empty() ? kDepotHorizon : tw[0].latest; }

  // Checks the structural invariants (array sizes, demand bounds, windows).
  // Throws DataError with a description on failure.
  void validate() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

}  // namespace mtlkd
