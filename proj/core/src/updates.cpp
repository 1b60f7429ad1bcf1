#include "sparsecode/updates.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sparsecode/spectral.hpp"

namespace sparsecode {

namespace {

constexpr std::size_t kChunk = 1024;  // fixed reduction chunk, order-stable

void check_batch(const Matrix& a, const Matrix& batch, const char* who) {
  if (batch.cols() == 0) throw std::invalid_argument(std::string(who) + ": empty batch");
  if (batch.rows() != a.rows()) {
    throw std::invalid_argument(std::string(who) + ": sample dimension mismatch");
  }
}

// Shared accumulation loop for the simple/OF estimators; `use_signs` picks
// sgn(x)^T vs x^T as the right factor.
Matrix residual_outer_mean(const Matrix& a, const Matrix& batch,
                           const DecodeConfig& cfg, bool use_signs) {
  const Index p = batch.cols();
  Matrix total = Matrix::Zero(a.rows(), a.cols());
  Matrix partial = Matrix::Zero(a.rows(), a.cols());
  for (Index s = 0; s < p; ++s) {
    const Vector y = batch.col(s);
    const SparseCode x = threshold_decode(a, y, cfg);
    if (!x.support.empty()) {
      Vector resid = -y;
      for (std::size_t t = 0; t < x.support.size(); ++t) {
        resid += x.values[t] * a.col(x.support[t]);
      }
      for (std::size_t t = 0; t < x.support.size(); ++t) {
        const double w =
            use_signs ? (x.values[t] > 0.0 ? 1.0 : -1.0) : x.values[t];
        partial.col(x.support[t]) += w * resid;
      }
    }
    if ((s + 1) % kChunk == 0) {
      total += partial;
      partial.setZero();
    }
  }
  total += partial;
  return total / static_cast<double>(p);
}

}  // namespace

GradientEstimate simple_gradient_hat(const Matrix& a, const Matrix& batch,
                                     const DecodeConfig& cfg) {
  check_batch(a, batch, "simple_gradient_hat");
  return {residual_outer_mean(a, batch, cfg, /*use_signs=*/true),
          GradientRule::Simple, GradientMode::Empirical,
          static_cast<std::size_t>(batch.cols())};
}

GradientEstimate simple_gradient_expected(const Matrix& a, const Matrix& astar,
                                          const SupportStats& stats) {
  if (a.rows() != astar.rows() || a.cols() != astar.cols()) {
    throw std::invalid_argument("simple_gradient_expected: dimension mismatch");
  }
  const Vector lambda = (a.array() * astar.array()).colwise().sum();
  Matrix t = a.transpose() * astar;  // t(j, i) = <A_j, A*_i>
  t.diagonal().setZero();
  Matrix g = stats.p_i * (stats.q_i * (a * lambda.asDiagonal() - astar) +
                          stats.q_ij * (a * t));
  return {std::move(g), GradientRule::Simple, GradientMode::AnalyticOracle, 0};
}

GradientEstimate of_gradient_hat(const Matrix& a, const Matrix& batch,
                                 const DecodeConfig& cfg) {
  check_batch(a, batch, "of_gradient_hat");
  return {residual_outer_mean(a, batch, cfg, /*use_signs=*/false),
          GradientRule::OlshausenField, GradientMode::Empirical,
          static_cast<std::size_t>(batch.cols())};
}

GradientEstimate of_gradient_expected(const Matrix& a, const Matrix& astar,
                                      const SupportStats& stats) {
  if (a.rows() != astar.rows() || a.cols() != astar.cols()) {
    throw std::invalid_argument("of_gradient_expected: dimension mismatch");
  }
  const Index m = a.cols();
  const double q1 = stats.q_i, q2 = stats.q_ij, q3 = stats.q_ijl;
  const Vector lambda = (a.array() * astar.array()).colwise().sum();

  // P(j, i) = <A*_j, A_i>; S(j, i) = <A_j, A*_i>
  const Matrix p = astar.transpose() * a;
  const Matrix s = a.transpose() * astar;
  const Matrix r = p.transpose() * p;  // r(., i) = P^T P.col(i)
  const Vector pdiag = p.diagonal();

  Matrix g(a.rows(), m);
  for (Index i = 0; i < m; ++i) {
    // leading term of E[(y - Ax) x_i]: q1 (lambda A*_i - lambda^2 A_i)
    Vector t1 = q1 * (lambda(i) * astar.col(i) - lambda(i) * lambda(i) * a.col(i));

    // (I - A_i A_i^T) A*_{-i} diag(q_ij) A*_{-i}^T A_i
    Vector v2 = p.col(i);
    v2(i) = 0.0;
    Vector w2 = q2 * (astar * v2);
    Vector t2 = w2 - a.col(i) * (a.col(i).dot(w2));

    // lambda_i A_{-i} diag(q_ij) A_{-i}^T A*_i
    Vector v3 = s.col(i);
    v3(i) = 0.0;
    Vector t3 = lambda(i) * q2 * (a * v3);

    // A_{-i} v with v_j = sum_{l != i} q_{i,j,l} <A*_l, A_i><A*_l, A_j>;
    // the l == j term carries the pair probability q_ij:
    // v_j = q3 R(j,i) - q3 P(i,i) P(i,j) + (q2 - q3) P(j,i) P(j,j)
    Vector v4 = q3 * (r.col(i) - pdiag(i) * p.row(i).transpose()) +
                (q2 - q3) * pdiag.cwiseProduct(p.col(i));
    v4(i) = 0.0;
    Vector t4 = a * v4;

    // E[(Ax - y) x_i] = -(t1 + t2 - t3 - t4)
    g.col(i) = -t1 - t2 + t3 + t4;
  }
  return {std::move(g), GradientRule::OlshausenField, GradientMode::AnalyticOracle, 0};
}

GradientEstimate unbiased_gradient_hat(const Matrix& a, const Matrix& batch,
                                       const DecodeConfig& cfg) {
  check_batch(a, batch, "unbiased_gradient_hat");
  const Index m = a.cols();
  const Index p = batch.cols();

  // standard decodes once: z = A^T y per sample
  const Matrix z = a.transpose() * batch;
  Matrix g = Matrix::Zero(a.rows(), m);

  for (Index i = 0; i < m; ++i) {
    const double norm_i = a.col(i).norm();
    if (norm_i < 1e-300) {
      throw std::invalid_argument("unbiased_gradient_hat: zero column");
    }
    const Vector ahat = a.col(i) / norm_i;
    const Vector t = a.transpose() * ahat;       // <A_j, ahat_i>
    const Vector proj = batch.transpose() * ahat;  // <y_s, ahat_i>

    Vector total = Vector::Zero(a.rows());
    Vector partial = Vector::Zero(a.rows());
    std::size_t since_flush = 0;
    for (Index s = 0; s < p; ++s) {
      const double zi = z(i, s);
      if (std::abs(zi) <= cfg.threshold) continue;  // sgn(x_i) = 0
      const double sign_i = zi > 0.0 ? 1.0 : -1.0;
      // decode against B^(i): (B^T y)_j = z_j - t_j <y, ahat> for j != i
      Vector resid = -batch.col(s);
      double along = 0.0;
      for (Index j = 0; j < m; ++j) {
        const double bz = (j == i) ? zi : z(j, s) - t(j) * proj(s);
        if (std::abs(bz) > cfg.threshold) {
          resid += bz * a.col(j);
          if (j != i) along += bz * t(j);
        }
      }
      resid -= along * ahat;  // B_j = A_j - t_j ahat for j != i
      partial += sign_i * resid;
      if (++since_flush == kChunk) {
        total += partial;
        partial.setZero();
        since_flush = 0;
      }
    }
    total += partial;
    g.col(i) = total / static_cast<double>(p);
  }
  return {std::move(g), GradientRule::Unbiased, GradientMode::Empirical,
          static_cast<std::size_t>(p)};
}

GradientEstimate unbiased_gradient_expected(const Matrix& a, const Matrix& astar,
                                            const SupportStats& stats) {
  if (a.rows() != astar.rows() || a.cols() != astar.cols()) {
    throw std::invalid_argument("unbiased_gradient_expected: dimension mismatch");
  }
  const Index m = a.cols();
  const Vector lambda = (a.array() * astar.array()).colwise().sum();
  Matrix g(a.rows(), m);
  for (Index i = 0; i < m; ++i) {
    Matrix b = projected_decoding_matrix(a, static_cast<int>(i));
    b.col(i).setZero();  // B_{-i}
    const Vector diff = astar.col(i) - a.col(i);
    // correction term written through B_{-i}^T (A*_i - A_i); vanishes at A = A*
    Vector eps = stats.q_ij * (b * (b.transpose() * diff));
    g.col(i) = stats.p_i * (stats.q_i * (lambda(i) * a.col(i) - astar.col(i)) + eps);
  }
  return {std::move(g), GradientRule::Unbiased, GradientMode::AnalyticOracle, 0};
}

Matrix update_step(const Matrix& a, const GradientEstimate& g, double eta) {
  if (eta < 0.0) throw std::invalid_argument("update_step: eta must be >= 0");
  if (g.g.rows() != a.rows() || g.g.cols() != a.cols()) {
    throw std::invalid_argument("update_step: dimension mismatch");
  }
  return a - eta * g.g;
}

ProjectionResult project_to_B(const Matrix& a, const ProjectionSetB& set_b,
                              int max_sweeps, double tol) {
  if (set_b.delta0 <= 0.0 || set_b.norm_cap <= 0.0) {
    throw std::invalid_argument("project_to_B: invalid set parameters");
  }
  if (set_b.anchor.rows() != a.rows() || set_b.anchor.cols() != a.cols()) {
    throw std::invalid_argument("project_to_B: anchor dimension mismatch");
  }

  auto project_columns = [&](const Matrix& x) {
    Matrix out = x;
    for (Index j = 0; j < x.cols(); ++j) {
      const Vector d = x.col(j) - set_b.anchor.col(j);
      const double norm = d.norm();
      if (norm > set_b.delta0) {
        out.col(j) = set_b.anchor.col(j) + (set_b.delta0 / norm) * d;
      }
    }
    return out;
  };

  // Dykstra: increments p/q restore the Frobenius-nearest point of the
  // intersection, which plain alternation does not.
  Matrix x = a;
  Matrix p = Matrix::Zero(a.rows(), a.cols());
  Matrix q = Matrix::Zero(a.rows(), a.cols());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Matrix x_prev = x;
    const Matrix y = project_columns(x + p);
    p = x + p - y;
    x = clip_singular_values(y + q, set_b.norm_cap);
    q = y + q - x;
    if ((x - x_prev).norm() < tol) {
      return {x, true, sweep + 1};
    }
  }
  return {x, false, max_sweeps};
}

}  // namespace sparsecode
