#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace trustnav::harness {

/// Runs work(i, worker) for i in [0, n) on up to `workers` threads and
/// passes each result to emit(i, result) strictly in index order, one call
/// at a time. If any item throws (in work or in its emit), no further items
/// start, everything before the lowest failed index is still emitted, and
/// that exception is rethrown.
template <class Work, class Emit>
void run_ordered(std::size_t n, int workers, Work work, Emit emit) {
  using Result = decltype(work(std::size_t{0}, 0));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::map<std::size_t, Result> pending;
  std::size_t emitted = 0;
  std::optional<std::size_t> failed_index;
  std::exception_ptr error;

  auto drain = [&] {
    while (!failed_index || emitted < *failed_index) {
      auto it = pending.find(emitted);
      if (it == pending.end()) return;
      emit(emitted, std::move(it->second));
      pending.erase(it);
      ++emitted;
    }
  };

  auto loop = [&](int worker) {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        Result r = work(i, worker);
        std::lock_guard lock(mu);
        pending.emplace(i, std::move(r));
        drain();
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          error = std::current_exception();
        }
        failed.store(true);
        return;
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    loop(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(loop, w);
    for (auto& t : pool) t.join();
  }
  if (error) {
    std::lock_guard lock(mu);
    drain();
    std::rethrow_exception(error);
  }
}

}  // namespace trustnav::harness
