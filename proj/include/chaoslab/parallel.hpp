#ifndef CHAOSLAB_PARALLEL_HPP
#define CHAOSLAB_PARALLEL_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace chaoslab {

/// Runs body(0..reps-1) on `workers` threads. The body must only write to
/// replicate-owned slots; results are then independent of the worker count.
void parallel_for_replicates(int reps, int workers, const std::function<void(int)>& body);

/// Accumulates dim-wide sums over replicates in a fixed block partition, so
/// the reduction order (and the result bytes) never depend on the worker
/// count. body adds replicate rep's contribution into acc[0..dim-1].
std::vector<double> blocked_accumulate(
    std::int64_t reps, int workers, std::size_t dim,
    const std::function<void(std::int64_t, double*)>& body, int nblocks = 256);

}  // namespace chaoslab

#endif
