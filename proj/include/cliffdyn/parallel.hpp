#pragma once

#include <cstddef>
#include <functional>

namespace cliffdyn {

/// Worker count: hardware concurrency capped by CLIFFDYN_THREADS when set.
/// Malformed or non-positive values fall back to 1.
std::size_t thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. Each index is
/// visited exactly once; callers write to slot i so results do not depend on
/// scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cliffdyn
