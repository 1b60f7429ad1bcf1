#include "sparsecode/metrics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsecode/spectral.hpp"

namespace sparsecode {

namespace {

// Hungarian algorithm (Kuhn-Munkres with potentials), minimizing.  Rows scan
// in order and ties resolve to the lowest column index, so the assignment is
// deterministic.
std::vector<int> solve_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::pair<std::vector<int>, std::vector<int>> match_columns(const Matrix& a,
                                                            const Matrix& astar) {
  if (a.rows() != astar.rows() || a.cols() != astar.cols()) {
    throw std::invalid_argument("match_columns: dimension mismatch");
  }
  const int m = static_cast<int>(a.cols());
  Matrix inner = astar.transpose() * a;  // inner(i, j) = <A*_i, A_j>
  Matrix cost = -inner.cwiseAbs();
  std::vector<int> perm = solve_assignment(cost);
  std::vector<int> signs(m, 1);
  for (int i = 0; i < m; ++i) {
    if (inner(i, perm[i]) < 0.0) signs[i] = -1;
  }
  return {perm, signs};
}

NearnessReport nearness(const Matrix& a, const Matrix& astar, double delta_target,
                        double kappa_target) {
  NearnessReport rep;
  auto [perm, signs] = match_columns(a, astar);
  rep.permutation = perm;
  rep.signs = signs;
  const int m = static_cast<int>(a.cols());
  Matrix aligned(a.rows(), m);
  for (int i = 0; i < m; ++i) {
    aligned.col(i) = static_cast<double>(signs[i]) * a.col(perm[i]);
  }
  Matrix diff = aligned - astar;
  rep.per_col_err.resize(m);
  for (int i = 0; i < m; ++i) rep.per_col_err[i] = diff.col(i).norm();
  rep.delta = *std::max_element(rep.per_col_err.begin(), rep.per_col_err.end());

  auto safe_norm = [](const Matrix& x) {
    try {
      return spectral_norm(x, 1e-9);
    } catch (const PowerIterationError&) {
      Eigen::JacobiSVD<Matrix> svd(x);
      return svd.singularValues()(0);
    }
  };
  const double ref = safe_norm(astar);
  rep.kappa = ref > 0.0 ? safe_norm(diff) / ref : 0.0;
  rep.is_near = rep.delta <= delta_target && rep.kappa <= kappa_target;
  return rep;
}

}  // namespace sparsecode
