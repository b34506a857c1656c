#pragma once

#include <string>

#include "mtlkd/core/instance.hpp"

namespace mtlkd::data {

// Human-readable JSON dump of an instance, for debugging.
std::string instance_to_json(const Instance& inst, int indent = 2);

}  // namespace mtlkd::data
