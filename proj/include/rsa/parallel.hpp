#pragma once

#include <cstddef>
#include <functional>

namespace rsa::parallel {

// Process-wide cap on worker threads. 0 means "use hardware concurrency".
void set_thread_limit(unsigned limit);
unsigned thread_limit();

// Calls body(i) for every i in [0, count). Work is split into contiguous
// static chunks, so the set of calls made never depends on the thread count;
// body must only write state owned by index i.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rsa::parallel
