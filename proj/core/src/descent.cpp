#include "sparsecode/descent.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsecode/spectral.hpp"

namespace sparsecode {

double correlation_slack(const Vector& g, const Vector& z, const Vector& zstar,
                         const CorrelationParams& cp) {
  if (g.size() != z.size() || z.size() != zstar.size()) {
    throw std::invalid_argument("correlation_slack: dimension mismatch");
  }
  const Vector d = z - zstar;
  return cp.alpha * d.squaredNorm() + cp.beta * g.squaredNorm() - g.dot(d);
}

namespace {

GradientEstimate evaluate_gradient(const Matrix& a, const Matrix& astar,
                                   const ModelParams& params,
                                   const SupportStats& stats,
                                   const DescentConfig& cfg, int iter) {
  if (cfg.mode == GradientMode::AnalyticOracle) {
    switch (cfg.rule) {
      case GradientRule::Simple:
        return simple_gradient_expected(a, astar, stats);
      case GradientRule::OlshausenField:
        return of_gradient_expected(a, astar, stats);
      case GradientRule::Unbiased:
        return unbiased_gradient_expected(a, astar, stats);
    }
  }
  // fresh samples every iteration, one stream pair per iteration index
  RngStream code_rng(cfg.seed, streams::kBatchCodes + static_cast<std::uint64_t>(iter));
  RngStream noise_rng(cfg.seed, streams::kBatchNoise + static_cast<std::uint64_t>(iter));
  const Matrix batch = generate_batch(astar, params, cfg.p_per_iter, code_rng, noise_rng);
  const DecodeConfig dec = DecodeConfig::for_model(params);
  switch (cfg.rule) {
    case GradientRule::Simple:
      return simple_gradient_hat(a, batch, dec);
    case GradientRule::OlshausenField:
      return of_gradient_hat(a, batch, dec);
    case GradientRule::Unbiased:
      return unbiased_gradient_hat(a, batch, dec);
  }
  throw std::logic_error("evaluate_gradient: unreachable");
}

DescentRecord make_record(int iter, const Matrix& a, const Matrix& astar,
                          const GradientEstimate& g, double eta,
                          double astar_norm, const CorrelationParams& cp) {
  DescentRecord rec;
  rec.iter = iter;
  rec.eta = eta;
  const Index m = a.cols();
  rec.col_err.resize(m);
  rec.col_slack.resize(m);
  rec.col_grad_norm.resize(m);
  double sum = 0.0, maxe = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Vector d = a.col(i) - astar.col(i);
    const double e = d.norm();
    rec.col_err[i] = e;
    sum += e;
    maxe = std::max(maxe, e);
    rec.col_grad_norm[i] = g.g.col(i).norm();
    rec.col_slack[i] = cp.alpha * d.squaredNorm() + cp.beta * g.g.col(i).squaredNorm() -
                       g.g.col(i).dot(d);
  }
  rec.max_col_err = maxe;
  rec.mean_col_err = sum / static_cast<double>(m);
  rec.grad_norm = g.g.norm();
  try {
    rec.spec_ratio = spectral_norm(a - astar, 1e-8) / astar_norm;
  } catch (const PowerIterationError& e) {
    rec.spec_ratio = e.last_iterate.sigma / astar_norm;
  }
  return rec;
}

}  // namespace

DescentResult run_descent(const Matrix& astar, const Matrix& a0,
                          const ModelParams& params, const DescentConfig& cfg) {
  if (a0.rows() != astar.rows() || a0.cols() != astar.cols()) {
    throw std::invalid_argument("run_descent: A0/A* dimension mismatch");
  }
  if (cfg.iterations < 1) throw std::invalid_argument("run_descent: iterations >= 1");
  if (cfg.eta < 0.0) throw std::invalid_argument("run_descent: eta must be >= 0");
  if (cfg.mode == GradientMode::Empirical && cfg.p_per_iter < 1) {
    throw std::invalid_argument("run_descent: empirical mode needs p_per_iter >= 1");
  }
  const SupportStats stats = support_stats(params);
  const double astar_norm = spectral_norm(astar, 1e-10);

  // slack bookkeeping uses the closetocorrelated parameters
  CorrelationParams cp;
  cp.alpha = stats.p_i * stats.q_i / 4.0;
  cp.beta = 1.0 / (100.0 * cp.alpha);
  cp.eps = 0.0;

  DescentResult out;
  out.a = a0;
  out.trace.slack_params = cp;
  out.trace.records.reserve(cfg.iterations + 1);
  for (int s = 0; s <= cfg.iterations; ++s) {
    const GradientEstimate g = evaluate_gradient(out.a, astar, params, stats, cfg, s);
    out.trace.records.push_back(
        make_record(s, out.a, astar, g, cfg.eta, astar_norm, cp));
    if (s == cfg.iterations) break;
    Matrix next = update_step(out.a, g, cfg.eta);
    if (cfg.project) {
      next = project_to_B(next, *cfg.project).a;
    }
    if (!next.allFinite()) {
      out.trace.aborted = true;
      break;
    }
    out.a = std::move(next);
  }
  return out;
}

AuditReport audit_convergence_bound(const DescentTrace& trace,
                                    const CorrelationParams& cp, double eta,
                                    double arithmetic_slack) {
  AuditReport rep;
  rep.eta_precondition_ok = eta <= 2.0 * cp.beta;
  const CorrelationParams& rc = trace.slack_params;
  const auto& recs = trace.records;
  for (std::size_t s = 0; s + 1 < recs.size(); ++s) {
    const auto& cur = recs[s];
    const auto& nxt = recs[s + 1];
    for (std::size_t i = 0; i < cur.col_err.size(); ++i) {
      const double lhs = nxt.col_err[i] * nxt.col_err[i];
      // slack is affine in (alpha, beta), so rebase the recorded value
      const double err2 = cur.col_err[i] * cur.col_err[i];
      const double g2 = cur.col_grad_norm[i] * cur.col_grad_norm[i];
      const double slack =
          cur.col_slack[i] + (cp.alpha - rc.alpha) * err2 + (cp.beta - rc.beta) * g2;
      const double rhs = (1.0 - 2.0 * cp.alpha * eta) * err2 + 2.0 * eta * slack;
      const double scale = std::max({1.0, lhs, std::abs(rhs)});
      if (lhs > rhs + arithmetic_slack * scale) {
        rep.violations.push_back({cur.iter, static_cast<int>(i), lhs, rhs});
        rep.max_excess = std::max(rep.max_excess, (lhs - rhs) / scale);
      }
    }
  }
  return rep;
}

std::pair<int, double> detect_floor(const DescentTrace& trace) {
  const auto& recs = trace.records;
  int run = 0;
  for (std::size_t s = 1; s < recs.size(); ++s) {
    const double prev = recs[s - 1].max_col_err;
    const double drop = prev > 0.0 ? (prev - recs[s].max_col_err) / prev : 0.0;
    run = (drop < 0.01) ? run + 1 : 0;
    if (run >= 3) {
      const int idx = static_cast<int>(s) - 2;
      return {idx, recs[idx].max_col_err};
    }
  }
  const int last = static_cast<int>(recs.size()) - 1;
  return {last, recs[last].max_col_err};
}

double fit_squared_error_ratio(const DescentTrace& trace, int max_window) {
  const auto [floor_idx, floor_val] = detect_floor(trace);
  const int upto = std::max(1, std::min(floor_idx, max_window));
  // least squares on log err^2 vs iteration
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int s = 0; s <= upto; ++s) {
    const double e = trace.records[s].max_col_err;
    if (e <= 0.0) break;
    const double y = 2.0 * std::log(e);
    sx += s;
    sy += y;
    sxx += static_cast<double>(s) * s;
    sxy += s * y;
    ++count;
  }
  if (count < 2) return 0.0;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace sparsecode
