#include "mis/replicates.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mis {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("MISX_THREADS")) {
    std::size_t value = 0;
    const char* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value > 0) {
      return value;
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void for_each_replicate(std::size_t replicates, std::uint64_t seed, std::uint64_t tag, std::size_t threads,
                        const std::function<void(std::size_t, RandomStream&)>& body) {
  if (threads == 0) {
    threads = default_thread_count();
  }
  threads = std::max<std::size_t>(1, std::min(threads, replicates));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&](std::size_t first) {
    try {
      for (std::size_t r = first; r < replicates; r += threads) {
        RandomStream rng(derive_seed(seed, r, tag));
        body(r, rng);
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back(worker, w);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

}  // namespace mis
