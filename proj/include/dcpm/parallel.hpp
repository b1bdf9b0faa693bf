#pragma once

#include <functional>

namespace dcpm {

/// Worker count for per-element loops. Defaults to 1. Results never depend on it:
/// parallel loops only write to per-index slots and all reductions are serial.
void set_thread_count(int n);
int thread_count();

/// Calls body(begin, end) over disjoint chunks covering [0, n).
void parallel_for(int n, const std::function<void(int, int)>& body);

} // namespace dcpm
