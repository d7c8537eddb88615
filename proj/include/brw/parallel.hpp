#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace brw {

/// Worker count: BRW_THREADS if set (>= 1), otherwise 1.
inline int worker_count() {
  if (const char* env = std::getenv("BRW_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Evaluates fn(rep) for rep in [0, reps) and returns the results in
/// replicate order. Each replicate must derive its own generator from its
/// index, which makes the output independent of scheduling.
template <typename Fn>
auto map_replicates(std::int64_t reps, Fn&& fn, int workers = worker_count())
    -> std::vector<std::invoke_result_t<Fn&, std::int64_t>> {
  using R = std::invoke_result_t<Fn&, std::int64_t>;
  std::vector<R> out(static_cast<std::size_t>(std::max<std::int64_t>(reps, 0)));
  if (reps <= 0) return out;
  workers = static_cast<int>(std::min<std::int64_t>(std::max(workers, 1), reps));
  if (workers == 1) {
    for (std::int64_t r = 0; r < reps; ++r) out[r] = fn(r);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    try {
      for (std::int64_t r = next++; r < reps; r = next++) out[r] = fn(r);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      next = reps;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace brw
