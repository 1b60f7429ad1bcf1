#include "sparsecode/init.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <optional>

#include "sparsecode/spectral.hpp"
#include "sparsecode/updates.hpp"

namespace sparsecode {

double InitConfig::dedup(int m) const {
  return dedup_radius > 0.0 ? dedup_radius : 1.0 / std::log(static_cast<double>(m));
}

std::size_t InitConfig::pair_budget(int m, int k) const {
  std::size_t budget = max_pairs;
  if (budget == 0) {
    const double r = static_cast<double>(m) / k;
    budget = static_cast<std::size_t>(std::ceil(50.0 * r * r * std::log(m)));
  }
  if (p1 > 0) budget = std::min(budget, p1 / 2);  // two pool-1 samples per pair
  return budget;
}

Matrix weighted_moment(const Vector& u, const Vector& v, const Matrix& samples) {
  if (samples.cols() == 0) throw std::invalid_argument("weighted_moment: no samples");
  if (u.size() != samples.rows() || v.size() != samples.rows()) {
    throw std::invalid_argument("weighted_moment: dimension mismatch");
  }
  const Index n = samples.rows();
  const Index p = samples.cols();
  Matrix acc = Matrix::Zero(n, n);
  for (Index s = 0; s < p; ++s) {
    const double w = u.dot(samples.col(s)) * v.dot(samples.col(s));
    acc.selfadjointView<Eigen::Lower>().rankUpdate(samples.col(s), w);
  }
  acc /= static_cast<double>(p);
  return acc.selfadjointView<Eigen::Lower>();
}

AnalyticMoment analytic_moment(const SparseCode& u_code, const SparseCode& v_code,
                               const Matrix& astar, const SupportStats& stats) {
  const Index m = astar.cols();
  auto synth = [&](const SparseCode& code) {
    Vector x = Vector::Zero(astar.rows());
    for (std::size_t t = 0; t < code.support.size(); ++t) {
      x += code.values[t] * astar.col(code.support[t]);
    }
    return x;
  };
  const Vector u = synth(u_code);
  const Vector v = synth(v_code);
  const Vector beta = astar.transpose() * u;
  const Vector betap = astar.transpose() * v;

  std::vector<char> in_u(m, 0), in_v(m, 0);
  for (int i : u_code.support) in_u[i] = 1;
  for (int i : v_code.support) in_v[i] = 1;

  // m x m cores; each term is A* K A*^T
  Matrix k_main = Matrix::Zero(m, m);
  Matrix k_e1 = Matrix::Zero(m, m);
  AnalyticMoment out;
  for (Index i = 0; i < m; ++i) {
    const double coeff = stats.q_i * stats.c_i * beta(i) * betap(i);
    if (in_u[i] && in_v[i]) {
      k_main(i, i) = coeff;
      out.main_coeffs.push_back(coeff);
    } else {
      k_e1(i, i) = coeff;
    }
  }
  const double bdot = beta.dot(betap);
  Matrix k_e2 = Matrix::Zero(m, m);
  for (Index j = 0; j < m; ++j) {
    k_e2(j, j) = stats.q_ij * (bdot - beta(j) * betap(j));
  }
  Matrix k_e3 = stats.q_ij * (beta * betap.transpose() + betap * beta.transpose());
  k_e3.diagonal().setZero();

  auto lift = [&](const Matrix& k) -> Matrix { return astar * k * astar.transpose(); };
  const Matrix main = lift(k_main);
  const Matrix e1 = lift(k_e1);
  const Matrix e2 = lift(k_e2);
  const Matrix e3 = lift(k_e3);
  out.total = main + e1 + e2 + e3;

  auto norm2 = [](const Matrix& x) {
    try {
      return spectral_norm(x, 1e-9);
    } catch (const PowerIterationError& e) {
      return e.last_iterate.sigma;
    }
  };
  out.norm_main = norm2(main);
  out.norm_e1 = norm2(e1);
  out.norm_e2 = norm2(e2);
  out.norm_e3 = norm2(e3);
  out.norm_errors = norm2(e1 + e2 + e3);
  return out;
}

bool uniqueness_test(double sigma1, double sigma2, const ModelParams& params,
                     const InitConfig& cfg) {
  if (sigma2 > sigma1 || sigma2 < 0.0) {
    throw std::invalid_argument("uniqueness_test: need sigma1 >= sigma2 >= 0");
  }
  const double km = static_cast<double>(params.k) / params.m;
  const double floor = cfg.sigma1_floor * km;
  const double ceil = cfg.sigma2_ceil * km / std::log(static_cast<double>(params.m));
  return sigma1 >= floor && sigma2 <= ceil;
}

namespace {

// Moment pool reduced to an orthonormal basis of the sample span.  Noiseless
// samples lie in the rank-<=m column space of A*, so per-pair moments shrink
// from n x n to r x r with identical singular values.
struct MomentSpace {
  Matrix basis;    // n x r
  Matrix reduced;  // r x p2
  double inv_p2 = 0.0;
};

MomentSpace build_moment_space(const Matrix& pool) {
  const Index n = pool.rows();
  const Index p2 = pool.cols();
  Matrix gram = Matrix::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(pool, 1.0 / static_cast<double>(p2));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      Matrix(gram.selfadjointView<Eigen::Lower>()));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("pairwise_init: sample Gram eigensolve failed");
  }
  const Vector& ev = eig.eigenvalues();  // ascending
  const double cut = ev(n - 1) * 1e-12;
  Index r = 0;
  for (Index i = 0; i < n; ++i) {
    if (ev(i) > cut) ++r;
  }
  MomentSpace ms;
  ms.basis = eig.eigenvectors().rightCols(r);
  ms.reduced = ms.basis.transpose() * pool;
  ms.inv_p2 = 1.0 / static_cast<double>(p2);
  return ms;
}

// M_tilde = (1/p2) Yr diag(w) Yr^T via sign-split symmetric rank updates.
Matrix reduced_moment(const MomentSpace& ms, const Vector& u, const Vector& v) {
  const Index r = ms.reduced.rows();
  const Index p2 = ms.reduced.cols();
  const Vector a = ms.reduced.transpose() * (ms.basis.transpose() * u);
  const Vector b = ms.reduced.transpose() * (ms.basis.transpose() * v);
  Matrix pos(r, p2), neg(r, p2);
  Index npos = 0, nneg = 0;
  for (Index s = 0; s < p2; ++s) {
    const double w = a(s) * b(s) * ms.inv_p2;
    if (w >= 0.0) {
      pos.col(npos++) = std::sqrt(w) * ms.reduced.col(s);
    } else {
      neg.col(nneg++) = std::sqrt(-w) * ms.reduced.col(s);
    }
  }
  Matrix acc = Matrix::Zero(r, r);
  if (npos > 0) acc.selfadjointView<Eigen::Lower>().rankUpdate(pos.leftCols(npos), 1.0);
  if (nneg > 0) acc.selfadjointView<Eigen::Lower>().rankUpdate(neg.leftCols(nneg), -1.0);
  return acc.selfadjointView<Eigen::Lower>();
}

struct PairCandidate {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  Vector z;
};

// Shared accept/dedup/assemble loop; `evaluate` yields the certified spectral
// data of the next pair, or nothing when its spectrum is not resolvable.
// Without a caller-provided norm cap (data-only mode) the cap falls back to
// twice the assembled dictionary's own spectral norm.
InitResult run_pair_loop(
    const ModelParams& params, const InitConfig& cfg, std::optional<double> norm_cap,
    const std::function<std::optional<PairCandidate>()>& evaluate) {
  const int n = params.n;
  const int m = params.m;
  const double radius = cfg.dedup(m);
  const std::size_t budget = cfg.pair_budget(m, params.k);

  CandidateList list;
  std::vector<Vector> kept;
  std::size_t used = 0;

  while (kept.size() < static_cast<std::size_t>(m) && used < budget) {
    std::optional<PairCandidate> cand = evaluate();
    ++used;
    if (!cand) continue;
    if (!uniqueness_test(cand->sigma1, cand->sigma2, params, cfg)) continue;

    Vector z = cand->z;
    z.normalize();
    Index argmax = 0;
    z.cwiseAbs().maxCoeff(&argmax);
    if (z(argmax) < 0.0) z = -z;

    bool dup = false;
    for (const Vector& c : kept) {
      if (std::min((z - c).norm(), (z + c).norm()) <= radius) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    kept.push_back(std::move(z));
    list.provenance.push_back({used - 1, cand->sigma1, cand->sigma2});
  }

  list.vectors = Matrix(n, static_cast<Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    list.vectors.col(static_cast<Index>(i)) = kept[i];
  }

  if (kept.size() < static_cast<std::size_t>(m)) {
    throw PartialInitError("pairwise_init: pair budget exhausted with " +
                               std::to_string(kept.size()) + " of " +
                               std::to_string(m) + " candidates",
                           std::move(list), used);
  }

  ProjectionSetB set_b;
  set_b.anchor = list.vectors;
  set_b.delta0 = radius;
  set_b.norm_cap = norm_cap;
  InitResult out;
  out.a0 = project_to_B(list.vectors, set_b).a;
  out.candidates = std::move(list);
  out.pairs_used = used;
  return out;
}

std::optional<PairCandidate> top_two_of(const Matrix& m) {
  try {
    auto [top, sigma2] = top_two_singular_values(m, 1e-8, 5000);
    return PairCandidate{top.sigma, sigma2, top.vector};
  } catch (const PowerIterationError&) {
    return std::nullopt;  // unresolved spectrum can never pass the certificate
  }
}

}  // namespace

InitResult pairwise_init(const Matrix& astar, const ModelParams& params,
                         const InitConfig& cfg) {
  params.validate();
  if (astar.rows() != params.n || astar.cols() != params.m) {
    throw std::invalid_argument("pairwise_init: dictionary/model mismatch");
  }
  const double norm_cap = 2.0 * spectral_norm(astar, 1e-9);

  if (cfg.oracle_moments) {
    const SupportStats stats = support_stats(params);
    RngStream code_rng(cfg.seed, streams::kPairCodes);
    auto evaluate = [&]() -> std::optional<PairCandidate> {
      const SparseCode cu = sample_code(params, code_rng);
      const SparseCode cv = sample_code(params, code_rng);
      return top_two_of(analytic_moment(cu, cv, astar, stats).total);
    };
    return run_pair_loop(params, cfg, norm_cap, evaluate);
  }

  RngStream moment_codes(cfg.seed, streams::kMomentCodes);
  RngStream moment_noise(cfg.seed, streams::kMomentNoise);
  const Matrix pool = generate_batch(astar, params, cfg.p2, moment_codes, moment_noise);
  const MomentSpace ms = build_moment_space(pool);

  RngStream pair_codes(cfg.seed, streams::kPairCodes);
  RngStream pair_noise(cfg.seed, streams::kPairNoise);
  auto evaluate = [&]() -> std::optional<PairCandidate> {
    const SparseCode cu = sample_code(params, pair_codes);
    const Vector u = generate_sample(astar, cu, params.noise_sigma, pair_noise);
    const SparseCode cv = sample_code(params, pair_codes);
    const Vector v = generate_sample(astar, cv, params.noise_sigma, pair_noise);
    std::optional<PairCandidate> c = top_two_of(reduced_moment(ms, u, v));
    if (c) c->z = ms.basis * c->z;  // lift back to ambient coordinates
    return c;
  };
  return run_pair_loop(params, cfg, norm_cap, evaluate);
}

InitResult pairwise_init_from_samples(const Matrix& samples, const ModelParams& params,
                                      const InitConfig& cfg) {
  params.validate();
  if (samples.rows() != params.n) {
    throw std::invalid_argument("pairwise_init_from_samples: sample dim mismatch");
  }
  if (cfg.oracle_moments) {
    throw std::invalid_argument(
        "pairwise_init_from_samples: oracle moments need a ground-truth dictionary");
  }
  if (samples.cols() < static_cast<Index>(cfg.p2) + 2) {
    throw std::invalid_argument("pairwise_init_from_samples: not enough samples");
  }
  const Index pair_cols = samples.cols() - static_cast<Index>(cfg.p2);
  const Matrix pair_pool = samples.leftCols(pair_cols);
  const Matrix moment_pool = samples.rightCols(static_cast<Index>(cfg.p2));
  const MomentSpace ms = build_moment_space(moment_pool);

  Index next = 0;
  auto evaluate = [&]() -> std::optional<PairCandidate> {
    if (next + 1 >= pair_pool.cols()) {
      throw PartialInitError("pairwise_init: pair sample pool exhausted",
                             CandidateList{}, static_cast<std::size_t>(next / 2));
    }
    const Vector u = pair_pool.col(next);
    const Vector v = pair_pool.col(next + 1);
    next += 2;
    std::optional<PairCandidate> c = top_two_of(reduced_moment(ms, u, v));
    if (c) c->z = ms.basis * c->z;
    return c;
  };
  // norm cap falls back to the assembled candidates' own scale in data mode;
  // run once to obtain them, then project with 2 |A_tilde|.
  const double provisional_cap = 1e12;
  InitResult res = run_pair_loop(params, cfg, provisional_cap, evaluate);
  ProjectionSetB set_b{res.candidates.vectors, cfg.dedup(params.m),
                       2.0 * spectral_norm(res.candidates.vectors, 1e-9)};
  res.a0 = project_to_B(res.candidates.vectors, set_b).a;
  return res;
}

}  // namespace sparsecode
