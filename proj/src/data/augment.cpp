#include "mtlkd/data/augment.hpp"

#include "mtlkd/core/error.hpp"

namespace mtlkd::data {

Point dihedral(const Point& p, int k) {
  const double x = p.x, y = p.y;
  switch (k) {
    case 0: return {x, y};
    case 1: return {y, x};
    case 2: return {1 - x, y};
    case 3: return {y, 1 - x};
    case 4: return {x, 1 - y};
    case 5: return {1 - y, x};
    case 6: return {1 - x, 1 - y};
    case 7: return {1 - y, 1 - x};
    default: throw ContractViolation("dihedral: k must be in [0, 8)");
  }
}

std::array<Instance, 8> augment8(const Instance& inst) {
  std::array<Instance, 8> out;
  for (int k = 0; k < 8; ++k) {
    out[k] = inst;
    for (auto& p : out[k].coords) p = dihedral(p, k);
  }
  return out;
}

}  // namespace mtlkd::data
