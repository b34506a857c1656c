#pragma once

#include <string>
#include <string_view>

#include "mtlkd/core/instance.hpp"

namespace mtlkd::data {

// Specification part of a TSPLIB/CVRPLIB file (everything before the first
// data section).
struct CvrplibHeader {
  std::string name;
  std::string type;
  std::string edge_weight_type;
  int dimension = 0;  // depot + customers
  double capacity = 0.0;
};

CvrplibHeader parse_cvrplib_header(std::string_view text);

// Full CVRPLIB instance. Coordinates are translated to the origin and divided
// by the larger of the x/y spans; `distance_scale` holds that span so
// objectives can be reported in native units. Throws DataError on a missing
// mandatory section, a non-integer demand or a non-zero depot demand.
Instance parse_cvrplib(std::string_view text);

struct SolomonHeader {
  std::string name;
  int vehicles = 0;
  double capacity = 0.0;
};

SolomonHeader parse_solomon_header(std::string_view text);

// Solomon VRPTW file. Coordinates, windows and service times share one scale
// factor (speed 1), stored in `distance_scale`. Node 0 is the depot row.
Instance parse_solomon(std::string_view text);

// Dispatches on content: CVRPLIB when a NODE_COORD_SECTION is present,
// Solomon when a CUSTOMER block is present.
Instance parse_benchmark(std::string_view text);

}  // namespace mtlkd::data
