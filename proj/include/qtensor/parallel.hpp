#pragma once

// Data-parallel helpers for pointwise field updates and reductions.
//
// Reductions use a fixed block partition and pairwise combination of block
// partials, so results depend only on the problem size and never on the
// number of worker threads.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace qtensor::parallel {

/// 0 restores the default (hardware concurrency).
void set_num_threads(unsigned n);
unsigned num_threads();

namespace detail {
void run_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& body);
}

inline constexpr std::size_t kBlock = 4096;

/// body(begin, end) over [0, n).  Runs serially for small n.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned t = num_threads();
  if (t <= 1 || n < 4 * kBlock) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(t, (n + kBlock - 1) / kBlock);
  const std::size_t per = (n + chunks - 1) / chunks;
  detail::run_chunks(chunks, [&](std::size_t c) {
    const std::size_t b = c * per;
    const std::size_t e = std::min(n, b + per);
    if (b < e) body(b, e);
  });
}

/// sum_{i<n} term(i), deterministic for any thread count.
template <typename Term>
double sum(std::size_t n, Term&& term) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  auto do_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[b] = acc;
  };
  if (num_threads() <= 1 || blocks < 4) {
    for (std::size_t b = 0; b < blocks; ++b) do_block(b);
  } else {
    detail::run_chunks(blocks, do_block);
  }
  // pairwise tree over block partials
  for (std::size_t width = 1; width < blocks; width *= 2)
    for (std::size_t b = 0; b + width < blocks; b += 2 * width) partial[b] += partial[b + width];
  return blocks ? partial[0] : 0.0;
}

/// max_{i<n} term(i) (0 for n == 0).
template <typename Term>
double max(std::size_t n, Term&& term) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, static_cast<double>(term(i)));
  return m;
}

}  // namespace qtensor::parallel
