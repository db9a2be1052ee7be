#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace selfnorm {

/// Splits [0, count) into `threads` contiguous shards and runs
/// fn(shard, begin, end) for each. Shard boundaries depend only on `count`
/// and `threads`; the first exception in shard order is rethrown.
template <class Fn>
void run_sharded(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  const auto bounds = [&](std::size_t s) { return count * s / shards; };
  if (shards == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] {
        try {
          fn(s, bounds(s), bounds(s + 1));
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace selfnorm
