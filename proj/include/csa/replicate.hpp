#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csa {

// Runs body(r) for r in [0, reps). jobs == 1 is the serial reference loop;
// otherwise replications are spread over `jobs` OpenMP threads (0 = runtime
// default). The first exception thrown by any replication is rethrown after
// the loop. Bodies must only write to per-replication slots.
template <class Body>
void for_each_replication(std::size_t reps, int jobs, Body&& body) {
  std::vector<std::exception_ptr> errors(reps);
  if (jobs == 1) {
    for (std::size_t r = 0; r < reps; ++r) {
      try {
        body(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  } else {
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (std::size_t r = 0; r < reps; ++r) {
      try {
        body(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace csa
