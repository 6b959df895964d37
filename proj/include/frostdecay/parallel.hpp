#pragma once

#include <cstddef>
#include <functional>

namespace frostdecay {

/// Upper bound on worker threads used by the library (0 = hardware default).
void set_worker_threads(unsigned count);
unsigned worker_threads();

/// Calls body(i) for every i in [0, count), possibly on several threads.
/// Callers write results into per-index slots and reduce them afterwards in
/// index order, which keeps every reduction independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace frostdecay
