#pragma once

#include <cstddef>
#include <functional>

namespace embadapt {

/// Runs task(i) for i in [0, count) on at most `threads` workers.
/// Tasks must write only to disjoint, pre-sized outputs. The first exception
/// thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace embadapt
