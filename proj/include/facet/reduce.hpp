#pragma once

// Deterministic summation.  Grid reductions have to produce bit-identical
// results regardless of thread count, so every sum over voxels goes through
// a fixed-shape pairwise tree: the input is cut into fixed-size blocks,
// each block is reduced by recursive halving, and the per-block partials
// are combined by the same halving in block order.  Threads only decide
// who computes which block, never the shape of the tree.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace facet {

// Recursive pairwise sum of a contiguous range.  Fixed evaluation order.
double pairwise_sum(std::span<const double> values);

// Number of blocks the deterministic reduction uses for `n` terms.
inline constexpr std::size_t kReduceBlock = 4096;

// Sum of term(i) for i in [0, n).  `threads <= 1` runs serially; any other
// value distributes blocks over that many workers.  The result is
// bit-identical for every thread count.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                         int threads = 1);

// Convenience overload for materialized data.
double deterministic_sum(std::span<const double> values, int threads = 1);

// Several sums in one sweep (for example charge + three dipole components +
// quadrupole components).  Evaluates term(i, out) which must fill all `m`
// accumulator slots; each slot is reduced through its own fixed tree.
std::vector<double> deterministic_sum_multi(
    std::size_t n, std::size_t m,
    const std::function<void(std::size_t, double*)>& term, int threads = 1);

}  // namespace facet
