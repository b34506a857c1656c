#include "mtlkd/core/instance.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "mtlkd/core/error.hpp"

namespace mtlkd {

double Instance::distance(int i, int j) const {
  const int n = num_nodes();
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw ContractViolation("distance: node index out of range (" +
                            std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  const double dx = coords[i].x - coords[j].x;
  const double dy = coords[i].y - coords[j].y;
  return std::sqrt(dx * dx + dy * dy);
}

void Instance::validate() const {
  const auto n = coords.size();
  if (n < 2) throw DataError("instance needs a depot and at least one customer");
  if (demand.size() != n || service_time.size() != n || tw.size() != n) {
    throw DataError("instance arrays have inconsistent lengths");
  }
  if (!(capacity > 0.0)) throw DataError("capacity must be positive");
  if (!(speed > 0.0)) throw DataError("speed must be positive");
  if (variant.duration_limit && !(duration_limit > 0.0)) {
    throw DataError("duration limit must be positive");
  }
  if (demand[0] != 0) throw DataError("depot demand must be 0");
  for (std::size_t i = 1; i < n; ++i) {
    if (demand[i] < 0 && !variant.backhaul) {
      throw DataError("negative demand in a variant without backhauls");
    }
    if (std::abs(demand[i]) >= capacity) {
      throw DataError("customer " + std::to_string(i) + " demand exceeds capacity");
    }
    if (service_time[i] < 0.0) throw DataError("negative service time");
    if (variant.time_window) {
      if (tw[i].earliest > tw[i].latest) throw DataError("time window with earliest > latest");
      if (tw[i].latest > tw[0].latest + kFeasSlack) {
        throw DataError("customer window closes after the depot");
      }
    }
  }
}

}  // namespace mtlkd
