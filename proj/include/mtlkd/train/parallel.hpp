#pragma once

#include <functional>

namespace mtlkd::train {

// Runs body(i) for i in [0, count) on up to `threads` threads. Work is split
// into contiguous blocks, so which thread runs an index never affects the
// result as long as body(i) only writes to slot i.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace mtlkd::train
