#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace whitesync::detail {

inline unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(begin, end) over contiguous chunks of [0, count). Workers only
// write to disjoint index ranges, so callers stay deterministic as long as
// any final reduction happens in index order.
template <typename Body>
void parallel_for(std::uint64_t count, unsigned threads, const Body& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads),
                                                    count == 0 ? 1 : count));
  if (workers <= 1) {
    body(0, count);
    return;
  }
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min<std::uint64_t>(chunk, count));
  for (auto& t : pool) t.join();
}

}  // namespace whitesync::detail
