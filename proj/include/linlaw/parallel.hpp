#pragma once

#include <cstddef>
#include <functional>

namespace linlaw::detail {

/// Runs fn(0) .. fn(count - 1) on up to `workers` threads. Exceptions are
/// collected and the one thrown for the lowest index is rethrown, so
/// failure behaviour does not depend on scheduling.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

} // namespace linlaw::detail
