#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tailrisk::detail {

// Fixed block size: block boundaries, hence per-block partial results, do
// not depend on the worker count.
inline constexpr std::size_t kBlockSize = 4096;

inline std::size_t block_count(std::size_t count) { return (count + kBlockSize - 1) / kBlockSize; }

// Runs fn(block_index, begin, end) over all blocks on `workers` threads.
template <class Fn>
void for_each_block(std::size_t count, unsigned workers, Fn&& fn) {
  const std::size_t blocks = block_count(count);
  const unsigned nthreads = static_cast<unsigned>(std::clamp<std::size_t>(workers == 0 ? 1 : workers, 1, std::max<std::size_t>(blocks, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    try {
      for (std::size_t b = next++; b < blocks; b = next++) {
        const std::size_t begin = b * kBlockSize;
        fn(b, begin, std::min(count, begin + kBlockSize));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };
  if (nthreads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tailrisk::detail
