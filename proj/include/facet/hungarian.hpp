#pragma once

// Minimum-cost perfect assignment on a square cost matrix (Hungarian
// algorithm with potentials, O(n^3)).  Used to match transformed points to
// original points inside the symmetry-measure evaluation.

#include <cstddef>
#include <vector>

namespace facet {

// cost is row-major n*n; returns assignment[row] = column.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost,
                                          std::size_t n);

}  // namespace facet
