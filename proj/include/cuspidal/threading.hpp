#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace cuspidal {

/// Worker count: hardware concurrency, capped by the CUSPIDAL_THREADS
/// environment variable when set.
inline unsigned worker_count() {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* cap = std::getenv("CUSPIDAL_THREADS")) {
    const long parsed = std::strtol(cap, nullptr, 10);
    if (parsed >= 1 && static_cast<unsigned>(parsed) < workers)
      workers = static_cast<unsigned>(parsed);
  }
  return workers;
}

/// Runs body(chunk, begin, end) on contiguous chunks of [0, total) across
/// worker threads. Chunks are indexed so that callers can merge per-chunk
/// results in a deterministic order afterwards.
inline std::size_t parallel_chunks(
    std::size_t total,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), total == 0 ? 1 : total);
  if (workers <= 1) {
    body(0, 0, total);
    return 1;
  }
  std::vector<std::thread> threads;
  const std::size_t per = (total + workers - 1) / workers;
  for (std::size_t c = 0; c < workers; ++c) {
    const std::size_t lo = c * per;
    const std::size_t hi = std::min(total, lo + per);
    threads.emplace_back([&body, c, lo, hi] { body(c, lo, hi); });
  }
  for (auto& t : threads) t.join();
  return workers;
}

}  // namespace cuspidal
