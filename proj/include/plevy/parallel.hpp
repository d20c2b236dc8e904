#pragma once

#include <cstddef>
#include <functional>

namespace plevy {

/// Worker count used by data-parallel loops (at least 1). Defaults to 1.
void set_threads(int n);
int threads();

/// Calls body(i) for i in [0, n), split into contiguous blocks across the
/// worker threads. Callers write per-index results and reduce them in index
/// order afterwards, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Compensated sum of xs in index order.
double kahan_sum(const double* xs, std::size_t n);

}  // namespace plevy
