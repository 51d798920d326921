#include "manip/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace manip {

void apply_thread_cap_from_env() {
  const char* cap = std::getenv("MANIPSIM_THREADS");
  if (cap == nullptr) return;
  try {
    int n = std::stoi(cap);
    if (n >= 1) omp_set_num_threads(n);
  } catch (...) {
    // malformed value: keep OpenMP defaults
  }
}

int worker_count() { return omp_get_max_threads(); }

namespace detail {

void run_parallel(std::size_t n, void (*body)(std::size_t, void*), void* ctx) {
  // A throw escaping an OpenMP region aborts the process; capture the first
  // exception and rethrow it afterwards.
  std::exception_ptr error;
#pragma omp parallel for schedule(static) shared(error)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i, ctx);
    } catch (...) {
#pragma omp critical(manip_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace detail
}  // namespace manip
