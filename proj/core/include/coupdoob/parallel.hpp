#ifndef COUPDOOB_PARALLEL_HPP
#define COUPDOOB_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace coupdoob {

// Worker count for replicated runs: hardware concurrency, capped by the
// COUPDOOB_THREADS environment variable and by the job count.
std::size_t worker_count(std::size_t jobs);

// Runs fn(begin, end) over a fixed block partition of [0, total). Each index
// is processed exactly once; callers keep results deterministic by writing
// into per-index slots (replica streams are independent by construction).
void parallel_blocks(std::size_t total, const std::function<void(std::size_t, std::size_t)> &fn);

} // namespace coupdoob

#endif
