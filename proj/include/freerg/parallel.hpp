#pragma once

#include <cstddef>
#include <functional>

namespace freerg {

// Worker count: FREERG_THREADS env var (clamped to [1,256]) if set, otherwise
// std::thread::hardware_concurrency().
int thread_budget();

// f(i) for i in [0,n); f must only touch slot-i state. Deterministic results
// regardless of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

} // namespace freerg
