#pragma once

#include <cstddef>

namespace freetorus {

/// Execution policy for the data-parallel kernels.  Every kernel has a serial
/// reference path that computes bit-identical results; tests compare the two
/// and the benchmark target times them against each other.
enum class Exec { Serial, Parallel };

/// Heuristic: below this many independent units the parallel dispatch is not
/// worth the fork/join overhead.
inline constexpr std::size_t kParallelGrain = 256;

bool parallel_enabled();
int max_threads();

}  // namespace freetorus
