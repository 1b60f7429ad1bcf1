#include "sparsecode/spectral.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace sparsecode {

namespace {

constexpr double kZeroFloor = 1e-280;

Vector start_vector(const Matrix& m) {
  Vector v = m.col(0);
  const double norm = v.norm();
  if (norm < kZeroFloor) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

// One power-iteration pass against gram = M M^T, with an optional deflation
// direction that is projected out of every iterate.  `scale` is an a-priori
// bound on sigma1^2; residuals at rounding level relative to it count as
// converged so that zero and deflated rank-deficient operators terminate.
SpectralPair iterate(const Matrix& gram, Vector v, const Vector* deflate,
                     double tol, std::size_t max_iter, double scale,
                     const char* label) {
  auto apply = [&](const Vector& x) -> Vector {
    Vector y = gram.selfadjointView<Eigen::Lower>() * x;
    if (deflate != nullptr) y -= (deflate->dot(y)) * (*deflate);
    return y;
  };
  if (deflate != nullptr) {
    v -= (deflate->dot(v)) * (*deflate);
    double vn = v.norm();
    if (vn < 1e-8) {
      // start vector lies in the deflated direction; fall back to basis vectors
      for (Index j = 0; j < gram.rows(); ++j) {
        v.setZero();
        v(j) = 1.0;
        v -= (deflate->dot(v)) * (*deflate);
        vn = v.norm();
        if (vn > 1e-6) break;
      }
    }
    v /= vn;
  }

  const double floor = 1e-13 * std::max(scale, kZeroFloor);
  double sigma2 = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vector w = apply(v);
    const double wn = w.norm();
    if (wn <= floor) {
      return {0.0, v};  // operator annihilates v: sigma is zero
    }
    v = w / wn;
    Vector gv = apply(v);
    sigma2 = v.dot(gv);
    const double resid = (gv - sigma2 * v).norm();
    if (resid <= tol * std::max(sigma2, kZeroFloor) + floor) {
      return {std::sqrt(std::max(sigma2, 0.0)), v};
    }
  }
  throw PowerIterationError(
      std::string(label) + ": power iteration did not converge",
      {std::sqrt(std::max(sigma2, 0.0)), v});
}

}  // namespace

SpectralPair top_singular_pair(const Matrix& m, double tol, std::size_t max_iter) {
  if (tol <= 0.0) throw std::invalid_argument("top_singular_pair: tol must be > 0");
  if (!m.allFinite()) throw std::invalid_argument("top_singular_pair: non-finite input");
  Matrix gram(m.rows(), m.rows());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
  const double scale = gram.diagonal().sum();  // trace >= sigma1^2
  return iterate(gram, start_vector(m), nullptr, tol, max_iter, scale,
                 "top_singular_pair");
}

std::pair<SpectralPair, double> top_two_singular_values(const Matrix& m, double tol,
                                                        std::size_t max_iter) {
  if (m.rows() < 2) {
    throw std::invalid_argument("top_two_singular_values: need at least 2 rows");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("top_two_singular_values: non-finite input");
  }
  Matrix gram(m.rows(), m.rows());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
  const double scale = gram.diagonal().sum();

  SpectralPair first = iterate(gram, start_vector(m), nullptr, tol, max_iter, scale,
                               "top_singular_pair");
  SpectralPair second = iterate(gram, start_vector(m), &first.vector, tol, max_iter,
                                scale, "top_two_singular_values");
  return {first, std::min(second.sigma, first.sigma)};
}

double spectral_norm(const Matrix& m, double tol) {
  return top_singular_pair(m, tol).sigma;
}

Matrix clip_singular_values(const Matrix& m, double cap) {
  if (cap <= 0.0) throw std::invalid_argument("clip_singular_values: cap must be > 0");
  if (!m.allFinite()) throw std::invalid_argument("clip_singular_values: non-finite input");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0) throw std::runtime_error("clip_singular_values: SVD failed");
  if (sv(0) <= cap) return m;  // already inside the ball
  Vector clipped = sv.cwiseMin(cap);
  return svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace sparsecode
