#pragma once

#include <cstddef>
#include <functional>

namespace tvlad {

/// Worker count: a scoped override if one is active, else TVLAD_THREADS,
/// else std::thread::hardware_concurrency().
std::size_t worker_count();

/// Pins worker_count() for the lifetime of the object (tests, CLI flag).
class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(std::size_t threads);
  ~ScopedThreadCount();
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  std::size_t previous_;
};

/// Runs body(i) for i in [0, n). Indices are handed out dynamically; callers
/// write results into slot i so the outcome never depends on scheduling.
/// The first exception thrown by any body is rethrown after all workers join.
/// Calls made from inside a running body execute serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tvlad
