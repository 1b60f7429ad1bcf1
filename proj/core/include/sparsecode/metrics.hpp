#pragma once

#include <vector>

#include "sparsecode/types.hpp"

namespace sparsecode {

/// Permutation/sign alignment of an estimate against a reference dictionary
/// and the resulting column-wise and spectral distances.
struct NearnessReport {
  std::vector<int> permutation;  // column pi(i) of A pairs with column i of A*
  std::vector<int> signs;        // +-1 per reference column
  std::vector<double> per_col_err;
  double delta = 0.0;  // max column error after alignment
  double kappa = 0.0;  // |A_aligned - A*| / |A*| (spectral)
  bool is_near = false;
};

/// Optimal assignment maximizing sum_i |<A_{pi(i)}, A*_i>|, with the sign of
/// each matched inner product (0 maps to +1).  Ties break to lower index.
std::pair<std::vector<int>, std::vector<int>> match_columns(const Matrix& a,
                                                            const Matrix& astar);

NearnessReport nearness(const Matrix& a, const Matrix& astar, double delta_target,
                        double kappa_target);

}  // namespace sparsecode
