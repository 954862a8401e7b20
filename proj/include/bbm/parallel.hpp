#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace bbm {

/// Thread fan-out for independent tasks. Each task writes only its own slot,
/// so results do not depend on the schedule.
struct Parallel {
  int threads = 1;

  void for_each(std::size_t n, const std::function<void(std::size_t)>& fn) const {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    // Lowest failing index wins so the reported error is schedule independent.
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
};

}  // namespace bbm
