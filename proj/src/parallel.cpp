#include "equiset/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace equiset {

std::size_t thread_budget() {
    if (const char* env = std::getenv("EQUISET_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    struct Failure {
        std::exception_ptr error;
        std::size_t index = 0;
    };
    std::vector<Failure> failures(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);

    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(begin + chunk, count);
        threads.emplace_back([begin, end, w, &body, &failures] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    failures[w] = {std::current_exception(), i};
                    return;
                }
            }
        });
    }
    for (std::thread& t : threads) t.join();

    const Failure* first = nullptr;
    for (const Failure& f : failures) {
        if (f.error && (first == nullptr || f.index < first->index)) first = &f;
    }
    if (first != nullptr) std::rethrow_exception(first->error);
}

}  // namespace equiset
