#pragma once

#include <Eigen/Dense>

namespace sparsecode {

// Dense column-major doubles throughout; columns are dictionary atoms or samples.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Top singular value together with the corresponding left singular vector.
struct SpectralPair {
  double sigma = 0.0;
  Vector vector;
};

inline double max_column_norm(const Matrix& d) {
  return d.colwise().norm().maxCoeff();
}

}  // namespace sparsecode
