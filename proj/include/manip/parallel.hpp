#pragma once

#include <cstddef>
#include <memory>

namespace manip {

// Every data-parallel kernel in this library runs through parallel_for with an
// explicit mode. Serial is the reference implementation; Parallel is the
// OpenMP version. Both produce identical results because each iteration only
// touches its own index and draws from a per-index rng substream.
enum class ExecMode { Serial, Parallel };

// Worker cap from MANIPSIM_THREADS (falls back to OpenMP defaults).
void apply_thread_cap_from_env();
int worker_count();

namespace detail {
void run_parallel(std::size_t n, void (*body)(std::size_t, void*), void* ctx);
}

template <class F>
void parallel_for(std::size_t n, ExecMode mode, F&& body) {
  if (mode == ExecMode::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  auto* fp = std::addressof(body);
  using Fp = decltype(fp);
  detail::run_parallel(
      n, [](std::size_t i, void* c) { (*static_cast<Fp>(c))(i); }, fp);
}

}  // namespace manip
