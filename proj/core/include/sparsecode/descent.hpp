#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsecode/updates.hpp"

namespace sparsecode {

struct DescentConfig {
  GradientRule rule = GradientRule::Simple;
  GradientMode mode = GradientMode::AnalyticOracle;
  double eta = 0.0;
  int iterations = 0;
  std::size_t p_per_iter = 0;
  std::optional<ProjectionSetB> project;
  std::uint64_t seed = 0;

  /// eta = eta_scale * m/k, the paper's Theta(m/k) rate with the constant
  /// exposed.
  static double eta_from_scale(double eta_scale, const ModelParams& params) {
    return eta_scale * static_cast<double>(params.m) / params.k;
  }
};

/// One trace row: state metrics at iteration s plus the gradient evaluated
/// there (rows 0..T-1 hold the gradients actually applied).
struct DescentRecord {
  int iter = 0;
  double max_col_err = 0.0;
  double mean_col_err = 0.0;
  double spec_ratio = 0.0;  // |A - A*| / |A*|
  double grad_norm = 0.0;   // Frobenius
  double eta = 0.0;
  std::vector<double> col_err;
  std::vector<double> col_slack;      // correlation slack per column
  std::vector<double> col_grad_norm;
};

/// Sufficient-descent parameters of the correlation condition.
struct CorrelationParams {
  double alpha = 0.0;
  double beta = 0.0;
  double eps = 0.0;
};

struct DescentTrace {
  std::vector<DescentRecord> records;
  CorrelationParams slack_params;  // (alpha, beta) the slacks were recorded with
  bool aborted = false;            // non-finite entries appeared mid-run

  double final_max_col_err() const { return records.back().max_col_err; }
};

struct DescentResult {
  Matrix a;
  DescentTrace trace;
};

/// Slack of the correlation inequality at one step:
/// alpha |z - z*|^2 + beta |g|^2 - <g, z - z*>.  The direction is
/// (alpha, beta, eps)-correlated iff the slack is <= eps.
double correlation_slack(const Vector& g, const Vector& z, const Vector& zstar,
                         const CorrelationParams& cp);

/// Decode -> gradient -> update (-> project) loop; per-iteration errors are
/// measured column-wise against astar (identity labeling), plus spectral
/// nearness.  Empirical mode draws a fresh batch per iteration from streams
/// derived from cfg.seed.
DescentResult run_descent(const Matrix& astar, const Matrix& a0,
                          const ModelParams& params, const DescentConfig& cfg);

struct AuditViolation {
  int iter = 0;
  int col = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AuditReport {
  bool eta_precondition_ok = true;  // eta <= 2 beta
  std::vector<AuditViolation> violations;
  double max_excess = 0.0;
};

/// Checks the per-step inequality
/// err_{s+1}^2 <= (1 - 2 alpha eta) err_s^2 + 2 eta slack_s per column, which
/// is an identity-level consequence of the slack definition when eta <= 2 beta.
AuditReport audit_convergence_bound(const DescentTrace& trace,
                                    const CorrelationParams& cp, double eta,
                                    double arithmetic_slack = 1e-12);

/// First iteration where the max-column-error decrease stays below 1% for
/// three consecutive steps; the error there is the measured systemic floor.
/// Falls back to the final record when no plateau is found.
std::pair<int, double> detect_floor(const DescentTrace& trace);

/// Least-squares fit of log squared error over the pre-floor segment;
/// returns the per-step squared-error ratio (1 - tau).
double fit_squared_error_ratio(const DescentTrace& trace, int max_window = 10);

}  // namespace sparsecode
