#pragma once

#include <array>

#include "mtlkd/core/instance.hpp"

namespace mtlkd::data {

// The eight symmetries of the unit square applied to a point, in the order
// (x,y) (y,x) (1-x,y) (y,1-x) (x,1-y) (1-y,x) (1-x,1-y) (1-y,1-x).
Point dihedral(const Point& p, int k);

// Eight images of an instance; image 0 is the original. Only coordinates
// change.
std::array<Instance, 8> augment8(const Instance& inst);

}  // namespace mtlkd::data
