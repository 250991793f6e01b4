#ifndef ASEP_PARALLEL_HPP
#define ASEP_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace asep {

// Worker count: ASEP_WORKERS if set, else the hardware count. Results must
// not depend on this value; jobs write into preassigned slots and every
// reduction runs in index order afterwards.
inline int worker_count() {
  if (const char* env = std::getenv("ASEP_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

inline void parallel_for(int64_t jobs, int workers,
                         const std::function<void(int64_t)>& fn) {
  if (workers <= 1 || jobs <= 1) {
    for (int64_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      int64_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int n = int(std::min<int64_t>(workers, jobs));
  pool.reserve(size_t(n));
  for (int w = 0; w < n; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace asep

#endif
