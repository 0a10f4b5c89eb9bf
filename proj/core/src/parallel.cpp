#include "coupdoob/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace coupdoob {

std::size_t worker_count(std::size_t jobs) {
    std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("COUPDOOB_THREADS")) {
        char *end = nullptr;
        unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != env && parsed >= 1)
            workers = static_cast<std::size_t>(parsed);
    }
    return std::max<std::size_t>(1, std::min(workers, jobs));
}

void parallel_blocks(std::size_t total,
                     const std::function<void(std::size_t, std::size_t)> &fn) {
    if (total == 0)
        return;
    const std::size_t workers = worker_count(total);
    if (workers == 1) {
        fn(0, total);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(total, begin + chunk);
        if (begin >= end)
            break;
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (std::thread &t : threads)
        t.join();
}

} // namespace coupdoob
