// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dtb {

// Worker count for source-parallel loops. DTB_THREADS overrides; default is
// hardware concurrency capped at 8 so desk-scale runs stay polite.
inline int thread_budget() {
  if (const char* env = std::getenv("DTB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) return 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

// Runs fn(i) for i in [0, count) on up to thread_budget() threads. Static
// partition; each index writes only its own output slot, so results do not
// depend on the schedule.
inline void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dtb
