#ifndef JINV_PARALLEL_HPP
#define JINV_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace jinv {

/// Cap the worker count used by parallel_for. 0 restores the hardware default.
void set_max_threads(int count);
int max_threads();

/**
 * Run body(begin..end) split into contiguous chunks across worker threads.
 * Workers write to disjoint ranges, so results never depend on the schedule.
 * Falls back to a plain loop when the range is small or only one worker is
 * allowed.
 */
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace jinv

#endif
