#include "sparsecode/decoding.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsecode {

SparseCode threshold_decode(const Matrix& a, const Vector& y, const DecodeConfig& cfg) {
  if (y.size() != a.rows()) {
    throw std::invalid_argument("threshold_decode: dimension mismatch");
  }
  Vector z = a.transpose() * y;
  SparseCode code;
  for (Index i = 0; i < z.size(); ++i) {
    if (std::abs(z(i)) > cfg.threshold) {
      code.support.push_back(static_cast<int>(i));
      code.values.push_back(cfg.keep_values ? z(i) : (z(i) > 0.0 ? 1.0 : -1.0));
    }
  }
  return code;
}

double sign_recovery_rate(const Matrix& a, const Matrix& astar,
                          const ModelParams& params, std::size_t trials,
                          std::uint64_t seed) {
  RngStream code_rng(seed, streams::kCodes);
  RngStream noise_rng(seed, streams::kNoise);
  const DecodeConfig cfg = DecodeConfig::for_model(params);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const SparseCode truth = sample_code(params, code_rng);
    const Vector y = generate_sample(astar, truth, params.noise_sigma, noise_rng);
    const SparseCode dec = threshold_decode(a, y, cfg);
    if (dec.support != truth.support) continue;
    bool signs_ok = true;
    for (std::size_t j = 0; j < dec.values.size(); ++j) {
      if ((dec.values[j] > 0.0) != (truth.values[j] > 0.0)) {
        signs_ok = false;
        break;
      }
    }
    hits += signs_ok;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

Matrix projected_decoding_matrix(const Matrix& a, int i) {
  if (i < 0 || i >= a.cols()) {
    throw std::invalid_argument("projected_decoding_matrix: column index out of range");
  }
  const double norm = a.col(i).norm();
  if (norm < 1e-300) {
    throw std::invalid_argument("projected_decoding_matrix: column i is zero");
  }
  const Vector ahat = a.col(i) / norm;
  Matrix b = a - ahat * (ahat.transpose() * a);
  b.col(i) = a.col(i);
  return b;
}

}  // namespace sparsecode
