#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace netperiod {

// Runs fn(0) .. fn(count-1) on up to `workers` threads (0 = hardware
// concurrency). Each index is processed exactly once; callers keep
// determinism by writing only to per-index slots.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) {
    workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
  }
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  threads.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) threads.emplace_back(body);
  for (auto& t : threads) t.join();
}

}  // namespace netperiod
