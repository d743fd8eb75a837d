#pragma once

// Execution-mode plumbing for the analysis kernels.
//
// Every kernel that loops over independent work items (coin strings, Monte
// Carlo trials, randomness outcomes) takes an exec::Mode.  The parallel lane
// writes each item's result into a preallocated slot and reduces in index
// order afterwards, so its output is bit-identical to the serial lane no
// matter how many threads OpenMP uses.  The serial lane is the reference
// implementation; tests compare the two and bench_modes times them.

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqma::exec {

enum class Mode { serial, parallel };

// Evaluate fn(i) for i in [0, count) into a vector, one slot per index.
template <class T, class Fn>
std::vector<T> indexed_map(std::size_t count, Mode mode, Fn&& fn) {
  std::vector<T> out(count);
  if (mode == Mode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i)
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
  }
  return out;
}

// Sum fn(i) over [0, count) in strictly increasing index order regardless of
// mode: the parallel path materializes per-index values first.
template <class Fn>
double indexed_sum(std::size_t count, Mode mode, Fn&& fn) {
  if (mode == Mode::serial) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += fn(i);
    return acc;
  }
  std::vector<double> vals = indexed_map<double>(count, mode, fn);
  double acc = 0.0;
  for (double v : vals) acc += v;
  return acc;
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace dqma::exec
