#include "sparsecode/genmodel.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sparsecode {

ModelParams ModelParams::rademacher(int n, int m, int k, double noise_sigma) {
  ModelParams p{n, m, k, CoeffLaw::Rademacher, 1.0, 1.0, noise_sigma};
  p.validate();
  return p;
}

ModelParams ModelParams::signed_uniform(int n, int m, int k, double c,
                                        double noise_sigma) {
  if (c <= 0.0 || c > 1.0) {
    throw std::invalid_argument("ModelParams: C must lie in (0, 1]");
  }
  // E[x^2 | x != 0] = (c^2 + c*cmax + cmax^2)/3 = 1
  const double cmax = 0.5 * (-c + std::sqrt(12.0 - 3.0 * c * c));
  ModelParams p{n, m, k, CoeffLaw::SignedUniform, c, cmax, noise_sigma};
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("ModelParams: n, m must be >= 1");
  if (k < 1 || k > m) throw std::invalid_argument("ModelParams: need 1 <= k <= m");
  if (coeff_c <= 0.0 || coeff_c > 1.0) {
    throw std::invalid_argument("ModelParams: C must lie in (0, 1]");
  }
  if (coeff_max < coeff_c) {
    throw std::invalid_argument("ModelParams: c_max < C");
  }
  if (noise_sigma < 0.0) throw std::invalid_argument("ModelParams: noise_sigma < 0");
  if (law == CoeffLaw::SignedUniform) {
    const double ex2 =
        (coeff_c * coeff_c + coeff_c * coeff_max + coeff_max * coeff_max) / 3.0;
    if (std::abs(ex2 - 1.0) > 1e-9) {
      throw std::invalid_argument("ModelParams: law not normalized to E[x^2]=1");
    }
  }
}

Vector SparseCode::dense(int m) const {
  Vector x = Vector::Zero(m);
  for (std::size_t t = 0; t < support.size(); ++t) x(support[t]) = values[t];
  return x;
}

Matrix generate_dictionary(int n, int m, std::uint64_t seed) {
  if (n < 2 || m < 2) throw std::invalid_argument("generate_dictionary: n, m >= 2");
  RngStream rng(seed, streams::kDict);
  Matrix a(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
    a.col(j).normalize();
  }
  return a;
}

Matrix generate_orthonormal_dictionary(int n, int m, std::uint64_t seed) {
  if (m > n) {
    throw std::invalid_argument("generate_orthonormal_dictionary: m must be <= n");
  }
  RngStream rng(seed, streams::kDict);
  Matrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, m);
  Matrix r = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);  // fix QR sign ambiguity
  }
  return q;
}

double coherence(const Matrix& a) {
  if (a.cols() < 2) throw std::invalid_argument("coherence: need at least 2 columns");
  for (Index j = 0; j < a.cols(); ++j) {
    if (std::abs(a.col(j).norm() - 1.0) > 1e-6) {
      throw std::invalid_argument("coherence: columns must be unit norm");
    }
  }
  Matrix gram = a.transpose() * a;
  double best = 0.0;
  for (Index i = 0; i < gram.rows(); ++i)
    for (Index j = i + 1; j < gram.cols(); ++j)
      best = std::max(best, std::abs(gram(i, j)));
  return std::sqrt(static_cast<double>(a.rows())) * best;
}

SupportStats support_stats(const ModelParams& params) {
  params.validate();
  const double m = params.m, k = params.k;
  SupportStats s;
  s.q_i = k / m;
  s.q_ij = (params.m >= 2) ? k * (k - 1) / (m * (m - 1)) : s.q_i;
  s.q_ijl = (params.m >= 3) ? k * (k - 1) * (k - 2) / (m * (m - 1) * (m - 2)) : 0.0;
  if (params.law == CoeffLaw::Rademacher) {
    s.p_i = 1.0;
    s.c_i = 1.0;
  } else {
    const double a = params.coeff_c, b = params.coeff_max;
    s.p_i = 0.5 * (a + b);
    s.c_i = (a * a * a * a + a * a * a * b + a * a * b * b + a * b * b * b +
             b * b * b * b) /
            5.0;
  }
  return s;
}

SparseCode sample_code(const ModelParams& params, RngStream& rng) {
  const int m = params.m, k = params.k;
  // uniform k-subset by partial Fisher-Yates
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(m - i));
    std::swap(idx[i], idx[j]);
  }
  SparseCode code;
  code.support.assign(idx.begin(), idx.begin() + k);
  std::sort(code.support.begin(), code.support.end());
  code.values.resize(k);
  for (int t = 0; t < k; ++t) {
    const double sign = (rng.next_u64() >> 63) ? 1.0 : -1.0;
    if (params.law == CoeffLaw::Rademacher) {
      code.values[t] = sign;
    } else {
      code.values[t] =
          sign * (params.coeff_c + (params.coeff_max - params.coeff_c) * rng.uniform());
    }
  }
  return code;
}

Vector generate_sample(const Matrix& astar, const SparseCode& code,
                       double noise_sigma, RngStream& noise_rng) {
  Vector y = Vector::Zero(astar.rows());
  for (std::size_t t = 0; t < code.support.size(); ++t) {
    if (code.support[t] >= astar.cols()) {
      throw std::invalid_argument("generate_sample: code index out of range");
    }
    y += code.values[t] * astar.col(code.support[t]);
  }
  if (noise_sigma > 0.0) {
    for (Index i = 0; i < y.size(); ++i) y(i) += noise_sigma * noise_rng.normal();
  }
  return y;
}

Matrix generate_batch(const Matrix& astar, const ModelParams& params, std::size_t p,
                      RngStream& code_rng, RngStream& noise_rng) {
  Matrix batch(astar.rows(), static_cast<Index>(p));
  for (std::size_t i = 0; i < p; ++i) {
    SparseCode code = sample_code(params, code_rng);
    batch.col(static_cast<Index>(i)) =
        generate_sample(astar, code, params.noise_sigma, noise_rng);
  }
  return batch;
}

}  // namespace sparsecode
