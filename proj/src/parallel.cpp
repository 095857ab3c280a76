#include "qtensor/parallel.hpp"

#include <atomic>

namespace qtensor::parallel {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_num_threads(unsigned n) { g_threads.store(n); }

unsigned num_threads() {
  const unsigned n = g_threads.load();
  if (n) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

namespace detail {

void run_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(num_threads(), n_chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) body(c);
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
}

}  // namespace detail

}  // namespace qtensor::parallel
