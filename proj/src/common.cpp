#include "wavebem/common.hpp"

#include <algorithm>

namespace wavebem {

namespace {
std::atomic<int> g_threads{0};
}

int hardware_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

int thread_count() {
  int n = g_threads.load();
  return n > 0 ? n : hardware_thread_count();
}

namespace detail {

void parallel_for_impl(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  int workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  // Block size is a function of n only, never of the worker count.
  std::size_t block = std::max<std::size_t>(1, n / 64);
  std::size_t n_blocks = (n + block - 1) / block;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto run = [&]() {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks || failed.load()) return;
      std::size_t lo = b * block;
      std::size_t hi = std::min(n, lo + block);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace detail

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace wavebem
