#pragma once

#include <cstddef>
#include <functional>

namespace equiset {

// Worker count: EQUISET_THREADS when set (clamped to >= 1), otherwise the
// hardware concurrency.
std::size_t thread_budget();

// Runs body(i) for every i in [0, count) across at most thread_budget()
// threads. Indices are handed out in fixed contiguous blocks, so the mapping
// of work to slots never depends on timing; callers that write to
// per-index slots get identical memory images for any thread count. The
// lowest-index exception, if any, is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace equiset
