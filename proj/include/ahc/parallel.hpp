#pragma once

#include <cstddef>
#include <functional>

namespace ahc {

/// Run fn(0), ..., fn(n - 1) on up to `jobs` threads. Items are claimed in index order;
/// the first exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace ahc
