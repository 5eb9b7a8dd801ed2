#include "rhlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace rhlab::parallel {

namespace {
std::atomic<int> g_workers{1};
}

void set_workers(int workers) { g_workers.store(std::max(1, workers)); }

int workers() { return g_workers.load(); }

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for_blocks(x.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) y[i] += alpha * x[i];
  });
}

void scale(double alpha, std::span<double> x) {
  for_blocks(x.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) x[i] *= alpha;
  });
}

}  // namespace rhlab::parallel
