#include "mpelab/numerics/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace mpelab::numerics {

int worker_count()
{
    const char* env = std::getenv("MPE_LAB_THREADS");
    if (!env || !*env) return 1;
    try {
        return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
        return 1;
    }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body, int workers)
{
    if (workers <= 0) workers = worker_count();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(1, n / 1024));
    if (w <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t b = k * chunk, e = std::min(n, b + chunk);
        pool.emplace_back([&, k, b, e] {
            try {
                if (b < e) body(b, e);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace mpelab::numerics
