#pragma once

#include <cstdint>
#include <vector>

#include "sparsecode/rng.hpp"
#include "sparsecode/types.hpp"

namespace sparsecode {

enum class CoeffLaw { Rademacher, SignedUniform };

/// Generative model y = A* x* (+ Gaussian noise): dimensions, sparsity and
/// the coefficient law.  Nonzero coefficients have magnitude in [C, c_max]
/// and are scaled so E[x^2 | x != 0] = 1.
struct ModelParams {
  int n = 0;
  int m = 0;
  int k = 0;
  CoeffLaw law = CoeffLaw::Rademacher;
  double coeff_c = 1.0;   // lower magnitude bound C in (0, 1]
  double coeff_max = 1.0; // upper magnitude bound; = C for Rademacher
  double noise_sigma = 0.0;

  static ModelParams rademacher(int n, int m, int k, double noise_sigma = 0.0);
  /// Signed-uniform law on [C, c_max] with c_max solved from E[x^2] = 1.
  static ModelParams signed_uniform(int n, int m, int k, double c,
                                    double noise_sigma = 0.0);
  void validate() const;
};

/// Exact support and moment statistics of the model: inclusion probabilities
/// for uniform k-subsets and the conditional |x| and x^4 moments.
struct SupportStats {
  double q_i = 0.0;       // Pr[i in S] = k/m
  double q_ij = 0.0;      // Pr[i,j in S] = k(k-1)/(m(m-1))
  double q_ijl = 0.0;     // Pr[i,j,l in S], exact triple probability
  double p_i = 0.0;       // E[x sgn(x) | x != 0]
  double c_i = 0.0;       // E[x^4 | x != 0]
};

/// Sparse coefficient vector: sorted support plus aligned nonzero values.
struct SparseCode {
  std::vector<int> support;
  std::vector<double> values;

  Vector dense(int m) const;
};

/// Dictionary with iid Gaussian columns normalized to unit length.
Matrix generate_dictionary(int n, int m, std::uint64_t seed);

/// Dictionary with exactly orthonormal columns (first m columns of a random
/// rotation); the zero-coherence member of the incoherent family.  Requires
/// m <= n.
Matrix generate_orthonormal_dictionary(int n, int m, std::uint64_t seed);

/// mu-hat = sqrt(n) * max_{i != j} |<A_i, A_j>| over unit columns.
double coherence(const Matrix& a);

SupportStats support_stats(const ModelParams& params);

/// Support uniform over k-subsets of [m]; values iid from the coefficient
/// law, independent of the support.
SparseCode sample_code(const ModelParams& params, RngStream& rng);

/// y = A* x (+ noise_sigma * N(0, I) when noise_sigma > 0, drawn from
/// noise_rng).
Vector generate_sample(const Matrix& astar, const SparseCode& code,
                       double noise_sigma, RngStream& noise_rng);

/// Batch of p samples as columns; codes and noise come from separate streams.
Matrix generate_batch(const Matrix& astar, const ModelParams& params,
                      std::size_t p, RngStream& code_rng, RngStream& noise_rng);

}  // namespace sparsecode
