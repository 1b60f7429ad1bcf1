#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sparsecode/genmodel.hpp"
#include "sparsecode/types.hpp"

namespace sparsecode {

/// Pairwise-initialization configuration.  Zero-valued fields fall back to
/// the model-derived defaults noted per field.
struct InitConfig {
  std::size_t p1 = 0;         // pair-sample budget; default 2 * max_pairs
  std::size_t p2 = 100000;    // moment-sample pool size
  double sigma1_floor = 0.3;  // accept when sigma1 >= floor * k/m
  double sigma2_ceil = 3.0;   // ... and sigma2 <= ceil * k/(m ln m)
  double dedup_radius = 0.0;  // default 1/ln(m)
  std::size_t max_pairs = 0;  // default 50 (m/k)^2 ln m
  std::uint64_t seed = 0;
  bool oracle_moments = false;  // analytic M_{u,v} instead of the sample average

  double dedup(int m) const;
  std::size_t pair_budget(int m, int k) const;
};

struct CandidateProvenance {
  std::size_t pair_index = 0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

/// Accepted candidate directions (columns, unit norm, sign-normalized so the
/// largest-magnitude coordinate is positive) with their provenance.
struct CandidateList {
  Matrix vectors;
  std::vector<CandidateProvenance> provenance;
};

struct InitResult {
  Matrix a0;
  CandidateList candidates;
  std::size_t pairs_used = 0;
};

/// Raised when the pair budget is exhausted before m candidates are found;
/// carries the partial list so callers may retry with looser thresholds.
class PartialInitError : public std::runtime_error {
 public:
  PartialInitError(const std::string& what, CandidateList partial, std::size_t pairs)
      : std::runtime_error(what), candidates(std::move(partial)), pairs_used(pairs) {}
  CandidateList candidates;
  std::size_t pairs_used = 0;
};

/// Empirical reweighted second moment (1/p) sum <y,u><y,v> y y^T computed
/// directly; columns of `samples` are the y's.
Matrix weighted_moment(const Vector& u, const Vector& v, const Matrix& samples);

/// Exact decomposition of E[<u,y><v,y> yy^T] for known generating codes:
/// shared-atom main term plus the three error terms.
struct AnalyticMoment {
  Matrix total;
  double norm_main = 0.0;
  double norm_e1 = 0.0;
  double norm_e2 = 0.0;
  double norm_e3 = 0.0;
  double norm_errors = 0.0;        // |E1 + E2 + E3|
  std::vector<double> main_coeffs; // q_i c_i beta_i beta'_i over shared atoms
};

AnalyticMoment analytic_moment(const SparseCode& u_code, const SparseCode& v_code,
                               const Matrix& astar, const SupportStats& stats);

/// sigma1 >= floor * k/m and sigma2 <= ceil * k/(m ln m): certificate that
/// the pair shares exactly one dictionary element.
bool uniqueness_test(double sigma1, double sigma2, const ModelParams& params,
                     const InitConfig& cfg);

/// Pairwise initialization against a synthetic ground truth: draws pair and
/// moment pools from the model, accepts certified top singular vectors,
/// deduplicates into L, and projects the assembled dictionary onto the
/// constraint set with norm cap 2 |A*|.
InitResult pairwise_init(const Matrix& astar, const ModelParams& params,
                         const InitConfig& cfg);

/// Data-only variant: the pools are slices of `samples` (first the pair pool
/// of 2*max_pairs columns, then p2 moment columns); the norm cap falls back
/// to 2 |A_tilde|.
InitResult pairwise_init_from_samples(const Matrix& samples, const ModelParams& params,
                                      const InitConfig& cfg);

}  // namespace sparsecode
