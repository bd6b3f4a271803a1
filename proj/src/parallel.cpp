#include "tvlad/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tvlad {
namespace {

std::atomic<std::size_t> g_override{0};
thread_local bool t_inside_pool = false;

std::size_t env_threads() {
  const char* raw = std::getenv("TVLAD_THREADS");
  if (raw == nullptr) return 0;
  try {
    const long value = std::stol(raw);
    return value > 0 ? static_cast<std::size_t>(value) : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

std::size_t worker_count() {
  if (const std::size_t forced = g_override.load(); forced > 0) return forced;
  if (const std::size_t env = env_threads(); env > 0) return env;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

ScopedThreadCount::ScopedThreadCount(std::size_t threads) : previous_(g_override.load()) {
  g_override.store(threads);
}

ScopedThreadCount::~ScopedThreadCount() { g_override.store(previous_); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = t_inside_pool ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = t_inside_pool;
    t_inside_pool = true;
    struct Reset {
      bool value;
      ~Reset() { t_inside_pool = value; }
    } reset{outer};
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tvlad
