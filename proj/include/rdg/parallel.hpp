#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rdg {

// Global worker count. Results never depend on it: work items map to fixed
// output slots and reductions run serially in item order.
void set_threads(int n);
int threads();

// Runs fn(i) for i in [0, n). Each item must write only to its own slots.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace rdg
