#pragma once

#include <cstddef>
#include <functional>

namespace ocean {

// Process-wide worker count, set once by the CLI `--threads` flag.
// parallel_for partitions [0, n) into one contiguous block per worker and
// every block writes disjoint output slots, so results are independent of
// the worker count whenever the body itself is.
void set_worker_count(int n);
int worker_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace ocean
