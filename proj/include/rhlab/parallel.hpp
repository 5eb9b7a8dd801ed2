#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rhlab::parallel {

// Work is cut into fixed-size blocks that do not depend on the worker count.
// Reductions sum per-block partials in block order, so every result is
// bitwise identical for any number of workers.
inline constexpr std::size_t kBlockSize = 2048;

void set_workers(int workers);
int workers();

inline std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

/// Calls body(begin, end) for every block of [0, n), possibly concurrently.
template <class Body>
void for_blocks(std::size_t n, Body&& body) {
  const auto blocks = static_cast<long long>(block_count(n));
#pragma omp parallel for schedule(static) num_threads(workers())
  for (long long b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = begin + kBlockSize < n ? begin + kBlockSize : n;
    body(begin, end);
  }
}

/// Sum of term(i) over [0, n) with the fixed blocked order described above.
template <class Term>
double blocked_sum(std::size_t n, Term&& term) {
  std::vector<double> partial(block_count(n), 0.0);
  const auto blocks = static_cast<long long>(partial.size());
#pragma omp parallel for schedule(static) num_threads(workers())
  for (long long b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = begin + kBlockSize < n ? begin + kBlockSize : n;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

}  // namespace rhlab::parallel
