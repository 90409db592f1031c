#pragma once

// private helper shared by the parallel loops: QOCT_THREADS caps the OpenMP
// worker count; unset or non-positive means "use everything available"

#ifdef _OPENMP

#include <omp.h>

#include <algorithm>
#include <cstdlib>

namespace qoct::detail {

inline int worker_count() {
  static const int cap = [] {
    const char* env = std::getenv("QOCT_THREADS");
    if (env == nullptr) {
      return 0;
    }
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed <= 0) {
      return 0;
    }
    return static_cast<int>(std::min<long>(parsed, 1024));
  }();
  const int available = omp_get_max_threads();
  return cap > 0 ? std::min(cap, available) : available;
}

}  // namespace qoct::detail

#endif
