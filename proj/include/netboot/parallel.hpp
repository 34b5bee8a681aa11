#pragma once

// Deterministic work sharding. Results must be written by item index; the
// sampled values themselves come from counter-based streams keyed by index,
// so the thread count never changes any output. NETBOOT_THREADS caps workers.

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace netboot {

inline int env_thread_count() {
  if (const char* env = std::getenv("NETBOOT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// fn(i) for i in [0, count); exceptions are rethrown (first by item index).
inline void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads < 1) threads = 1;
  const std::size_t workers = std::min<std::size_t>(threads, count == 0 ? 1 : count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_index = count;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (i < first_error_index) {
            first_error_index = i;
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  parallel_for(count, env_thread_count(), fn);
}

}  // namespace netboot
