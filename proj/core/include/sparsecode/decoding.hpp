#pragma once

#include <cstdint>

#include "sparsecode/genmodel.hpp"
#include "sparsecode/types.hpp"

namespace sparsecode {

/// One-step threshold decoding: keep entries of A^T y above the threshold.
/// keep_values=false stores the signs instead of the inner products.
struct DecodeConfig {
  double threshold = 0.5;
  bool keep_values = true;

  static DecodeConfig for_model(const ModelParams& params) {
    return {params.coeff_c / 2.0, true};
  }
};

/// x_i = <A_i, y> wherever |<A_i, y>| > threshold; support sorted ascending.
SparseCode threshold_decode(const Matrix& a, const Vector& y, const DecodeConfig& cfg);

/// Fraction of model samples whose decoded support and signs both match the
/// planted code exactly.  Draws trials fresh samples from (seed, codes/noise
/// streams) and decodes against `a` at threshold C/2.
double sign_recovery_rate(const Matrix& a, const Matrix& astar,
                          const ModelParams& params, std::size_t trials,
                          std::uint64_t seed);

/// Decoding matrix for the unbiased rule when updating column i: column i is
/// kept, every other column is projected orthogonal to it.
Matrix projected_decoding_matrix(const Matrix& a, int i);

}  // namespace sparsecode
