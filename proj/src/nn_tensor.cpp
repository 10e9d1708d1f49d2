#include "ifcgrl/nn/tensor.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ifcgrl::nn {

Tensor hcat(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(0) != b.dim(0)) {
    throw NnError(NnErrorKind::shape_mismatch, "hcat expects two matrices with equal row counts");
  }
  std::size_t rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  Tensor out({rows, ca + cb});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < ca; ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < cb; ++j) out(i, ca + j) = b(i, j);
  }
  return out;
}

std::pair<Tensor, Tensor> hsplit(const Tensor& x, std::size_t cols_a) {
  if (x.rank() != 2 || cols_a > x.dim(1)) {
    throw NnError(NnErrorKind::shape_mismatch, "hsplit column count out of range");
  }
  std::size_t rows = x.dim(0), cb = x.dim(1) - cols_a;
  Tensor a({rows, cols_a}), b({rows, cb});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols_a; ++j) a(i, j) = x(i, j);
    for (std::size_t j = 0; j < cb; ++j) b(i, j) = x(i, cols_a + j);
  }
  return {std::move(a), std::move(b)};
}

namespace {

unsigned worker_limit() {
  static unsigned cached = [] {
    if (const char* env = std::getenv("IFC_GRL_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1u;
  }();
  return cached;
}

}  // namespace

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  unsigned workers = worker_limit();
  if (n == 0) return;
  if (workers <= 1 || n <= grain) {
    fn(0, n);
    return;
  }
  std::size_t chunks = std::min<std::size_t>(workers, (n + grain - 1) / grain);
  std::size_t per = (n + chunks - 1) / chunks;
  std::vector<std::thread> threads;
  threads.reserve(chunks - 1);
  for (std::size_t c = 1; c < chunks; ++c) {
    std::size_t begin = c * per;
    std::size_t end = std::min(n, begin + per);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(0, std::min(n, per));
  for (std::thread& t : threads) t.join();
}

}  // namespace ifcgrl::nn
