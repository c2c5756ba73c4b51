#pragma once

#include <cstddef>
#include <functional>

namespace edof {

// Worker-pool size used by parallel_for. 0 means "all hardware threads".
void set_thread_count(unsigned n) noexcept;
unsigned thread_count() noexcept;

// Runs fn(i) for every i in [0, n). Each index must write only its own
// output slot; results therefore do not depend on scheduling. The first
// exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace edof
