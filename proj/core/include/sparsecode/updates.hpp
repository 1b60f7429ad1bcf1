#pragma once

#include <cstddef>

#include "sparsecode/decoding.hpp"
#include "sparsecode/genmodel.hpp"
#include "sparsecode/types.hpp"

namespace sparsecode {

enum class GradientRule { Simple, OlshausenField, Unbiased };
enum class GradientMode { Empirical, AnalyticOracle };

/// A gradient direction with its provenance.  G points from A* toward A, so
/// the update A - eta*G descends: the empirical estimators accumulate
/// (A x - y) against the decode, which is the energy gradient and matches
/// the analytic forms' sign convention.
struct GradientEstimate {
  Matrix g;
  GradientRule rule = GradientRule::Simple;
  GradientMode mode = GradientMode::Empirical;
  std::size_t samples_used = 0;
};

/// Convex constraint set for the projected rule: columns within delta0 of an
/// anchor, spectral norm at most norm_cap.
struct ProjectionSetB {
  Matrix anchor;
  double delta0 = 0.0;
  double norm_cap = 0.0;
};

struct ProjectionResult {
  Matrix a;
  bool converged = false;
  int sweeps = 0;
};

/// Simple (neural) rule: mean over the batch of (A x - y) sgn(x)^T with
/// x = threshold decode of each sample.  Batch columns are samples.
GradientEstimate simple_gradient_hat(const Matrix& a, const Matrix& batch,
                                     const DecodeConfig& cfg);

/// Closed-form expectation of the simple rule under exact sign recovery:
/// g_i = p q (lambda_i A_i - A*_i) + p * A_{-i} diag(q_ij) A_{-i}^T A*_i.
GradientEstimate simple_gradient_expected(const Matrix& a, const Matrix& astar,
                                          const SupportStats& stats);

/// Olshausen-Field rule: residual times decoded values, (A x - y) x^T.
GradientEstimate of_gradient_hat(const Matrix& a, const Matrix& batch,
                                 const DecodeConfig& cfg);

/// Exact expectation of the OF rule: leading term q(lambda^2 A_i - lambda A*_i)
/// plus the three quadratic corrections, including the triple-probability
/// term evaluated exactly under the uniform support law.
GradientEstimate of_gradient_expected(const Matrix& a, const Matrix& astar,
                                      const SupportStats& stats);

/// Unbiased rule: for each column the residual is formed against the
/// projected decoding matrix B^(i), so the systemic bias vanishes as A -> A*.
GradientEstimate unbiased_gradient_hat(const Matrix& a, const Matrix& batch,
                                       const DecodeConfig& cfg);

/// Oracle form of the unbiased rule with the correction written through
/// B_{-i}^T (A*_i - A_i); its unique fixed point is A = A*.
GradientEstimate unbiased_gradient_expected(const Matrix& a, const Matrix& astar,
                                            const SupportStats& stats);

Matrix update_step(const Matrix& a, const GradientEstimate& g, double eta);

/// Dykstra alternating projections onto the intersection of the column-ball
/// and spectral-ball constraints.  Stops when the Frobenius change of a full
/// sweep drops below tol.
ProjectionResult project_to_B(const Matrix& a, const ProjectionSetB& set_b,
                              int max_sweeps = 200, double tol = 1e-12);

}  // namespace sparsecode
