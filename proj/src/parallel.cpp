#include "chaoslab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace chaoslab {

void parallel_for_replicates(int reps, int workers, const std::function<void(int)>& body) {
  if (reps < 0 || workers < 1) throw std::invalid_argument("parallel_for_replicates: bad arguments");
  if (workers == 1 || reps < 2) {
    for (int r = 0; r < reps; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      try {
        for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> blocked_accumulate(
    std::int64_t reps, int workers, std::size_t dim,
    const std::function<void(std::int64_t, double*)>& body, int nblocks) {
  if (reps < nblocks) nblocks = std::max<int>(1, static_cast<int>(reps));
  const std::int64_t per = (reps + nblocks - 1) / nblocks;
  std::vector<std::vector<double>> partial(nblocks, std::vector<double>(dim, 0.0));
  parallel_for_replicates(nblocks, workers, [&](int blk) {
    const std::int64_t lo = static_cast<std::int64_t>(blk) * per;
    const std::int64_t hi = std::min<std::int64_t>(reps, lo + per);
    double* acc = partial[blk].data();
    for (std::int64_t r = lo; r < hi; ++r) body(r, acc);
  });
  std::vector<double> total(dim, 0.0);
  for (int b = 0; b < nblocks; ++b)
    for (std::size_t i = 0; i < dim; ++i) total[i] += partial[b][i];
  return total;
}

}  // namespace chaoslab
