#ifndef HPCA_VERIFY_HPP_
#define HPCA_VERIFY_HPP_

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hpca/estimators.hpp"
#include "hpca/matrix.hpp"
#include "hpca/rng.hpp"
#include "hpca/structure.hpp"
#include "hpca/subspace.hpp"
#include "hpca/svd.hpp"

namespace hpca {

/// Outcome of one deterministic-inequality checker.
struct LemmaReport {
  std::string lemma_id;
  Index trials = 0;
  Index violations = 0;
  double worst_ratio = 0.0;  // max over trials of observed / bound
};

namespace verify_detail {

constexpr double kRatioSlack = 1.0 + 1e-9;

inline void record(LemmaReport& rep, double observed, double bound) {
  if (bound <= 0.0) {
    // Zero bound: pass only if the observation is (numerically) zero too.
    if (observed > 1e-12) ++rep.violations;
    return;
  }
  const double ratio = observed / bound;
  rep.worst_ratio = std::max(rep.worst_ratio, ratio);
  if (ratio > kRatioSlack) ++rep.violations;
}

inline Matrix random_square(Index p, RngStream& rng, bool symmetric) {
  Matrix m = rng.gaussian_matrix(p, p);
  if (symmetric) m = 0.5 * (m + m.transpose()).eval();
  return m;
}

// Random b-sparse index set: the union of `layers` permutation supports, so
// each row and column holds at most `layers` entries.
inline CorruptionSet random_sparse_set(Index p, Index layers, RngStream& rng,
                                       bool symmetric) {
  std::vector<CorruptionSet::Pair> pairs;
  std::vector<Index> perm(static_cast<std::size_t>(p));
  for (Index l = 0; l < layers; ++l) {
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = p - 1; i > 0; --i) {
      const Index j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    for (Index i = 0; i < p; ++i) {
      pairs.emplace_back(i, perm[static_cast<std::size_t>(i)]);
      if (symmetric) pairs.emplace_back(perm[static_cast<std::size_t>(i)], i);
    }
  }
  return CorruptionSet(p, p, std::move(pairs));
}

// Row permutation plus right rotation of the stacked-identity construction:
// preserves the row-norm profile (hence the incoherence constant) while
// randomizing the subspace.
inline OrthonormalBasis random_incoherent_basis(Index p, Index r, RngStream& rng) {
  const Matrix base = construct_incoherent_basis(p, r).matrix();
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = p - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  Matrix permuted(p, r);
  for (Index i = 0; i < p; ++i) permuted.row(i) = base.row(perm[static_cast<std::size_t>(i)]);
  const Matrix rotation = qr_orthonormalize(rng.gaussian_matrix(r, r)).matrix();
  return OrthonormalBasis(permuted * rotation);
}

inline Matrix projector(const OrthonormalBasis& u) {
  return u.matrix() * u.matrix().transpose();
}

}  // namespace verify_detail

/// Sharp-family ratio |Delta(M)| / |M| = 2 - 2/p for M = 1 1^T - (p/2) I.
inline double delta_sharp_family_ratio(Index p) {
  const Matrix m = Matrix::Ones(p, p) - 0.5 * static_cast<double>(p) * Matrix::Identity(p, p);
  return spectral_norm(off_diagonal(m)) / spectral_norm(m);
}

/// |Delta(M)| <= 2 |M| on random matrices, exact sharp ratios 2 - 2/p on the
/// all-ones family, and |G(M)| <= sqrt(min(b, r)) |M| for rank-r M on random
/// b-sparse sets.
inline LemmaReport check_delta_norm(Index trials, RngStream& rng) {
  if (trials < 1) throw ParameterError("check_delta_norm: trials >= 1");
  LemmaReport rep{"delta_norm", trials, 0, 0.0};
  for (Index t = 0; t < trials; ++t) {
    const Index p = 2 + static_cast<Index>(rng.next_u64() % 19);  // 2..20
    const bool symmetric = (t % 2) == 0;
    const Matrix m = verify_detail::random_square(p, rng, symmetric);
    verify_detail::record(rep, spectral_norm(off_diagonal(m)), 2.0 * spectral_norm(m));

    // Masking a rank-r matrix on a b-sparse set.
    const Index r = 1 + static_cast<Index>(rng.next_u64() % 3);
    if (p >= r) {
      const Matrix low = rng.gaussian_matrix(p, r) * rng.gaussian_matrix(r, p);
      const Index layers = 1 + static_cast<Index>(rng.next_u64() % 3);
      const CorruptionSet g = verify_detail::random_sparse_set(p, layers, rng, false);
      const double b = static_cast<double>(g.sparsity_b());
      const double bound =
          std::sqrt(std::min(b, static_cast<double>(r))) * spectral_norm(low);
      verify_detail::record(rep, spectral_norm(mask_part(low, g)), bound);
    }
  }
  for (Index p : {Index{2}, Index{4}, Index{8}, Index{16}}) {
    const double expected = 2.0 - 2.0 / static_cast<double>(p);
    if (std::abs(delta_sharp_family_ratio(p) - expected) > 1e-10) ++rep.violations;
  }
  return rep;
}

/// Composition bounds for the structural operators after projection:
///   |D(P_U A)|    <= sqrt(I(U) r / p) |A|
///   |D(P_U D(A))| <= (I(U) r / p) |D(A)|
///   |G(P_U A)|    <= sqrt(I(U) r b (b^r) / p) |A|   (and the A P_V variant)
///   |G(P_U A P_V)| <= sqrt(I(U) I(V)) r b / p |A|
inline LemmaReport check_diag_projection(Index trials, RngStream& rng) {
  if (trials < 1) throw ParameterError("check_diag_projection: trials >= 1");
  LemmaReport rep{"diag_projection", trials, 0, 0.0};
  for (Index t = 0; t < trials; ++t) {
    const Index p = 8 + static_cast<Index>(rng.next_u64() % 25);  // 8..32
    const Index r = 1 + static_cast<Index>(rng.next_u64() % 4);
    // Cycle basis shapes: spread, spiky, and generic Gaussian.
    OrthonormalBasis u = [&] {
      switch (t % 3) {
        case 0:
          return verify_detail::random_incoherent_basis(p, r, rng);
        case 1: {
          Matrix spiky = Matrix::Zero(p, r);
          for (Index j = 0; j < r; ++j) spiky(j, j) = 1.0;
          return OrthonormalBasis(std::move(spiky));
        }
        default:
          return qr_orthonormalize(rng.gaussian_matrix(p, r));
      }
    }();
    const OrthonormalBasis v = qr_orthonormalize(rng.gaussian_matrix(p, r));
    const Matrix a = verify_detail::random_square(p, rng, false);
    const double iu = incoherence_constant(u);
    const double iv = incoherence_constant(v);
    const double rd = static_cast<double>(r), pd = static_cast<double>(p);
    const Matrix pu_a = verify_detail::projector(u) * a;

    verify_detail::record(rep, max_abs(diag_part(pu_a).diagonal()),
                          std::sqrt(iu * rd / pd) * spectral_norm(a));
    const Matrix da = diag_part(a);
    verify_detail::record(rep, max_abs((verify_detail::projector(u) * da).diagonal()),
                          (iu * rd / pd) * spectral_norm(da));

    const Index layers = 1 + static_cast<Index>(rng.next_u64() % 3);
    const CorruptionSet g = verify_detail::random_sparse_set(p, layers, rng, false);
    const double b = static_cast<double>(g.sparsity_b());
    const double masked_factor = std::sqrt(rd * b * std::min(b, rd) / pd);
    verify_detail::record(rep, spectral_norm(mask_part(pu_a, g)),
                          std::sqrt(iu) * masked_factor * spectral_norm(a));
    const Matrix a_pv = a * verify_detail::projector(v);
    verify_detail::record(rep, spectral_norm(mask_part(a_pv, g)),
                          std::sqrt(iv) * masked_factor * spectral_norm(a));
    const Matrix pu_a_pv = pu_a * verify_detail::projector(v);
    verify_detail::record(rep, spectral_norm(mask_part(pu_a_pv, g)),
                          std::sqrt(iu * iv) * rd * b / pd * spectral_norm(a));
  }
  return rep;
}

/// After a rank-r SVD of M + E, the discarded projection of M is controlled
/// by the perturbation alone: |P_perp M| <= 2|E| and
/// |P_perp M|_F <= 2 min(sqrt(r)|E|, |E|_F).
inline LemmaReport check_projection_after_svd(Index trials, RngStream& rng) {
  if (trials < 1) throw ParameterError("check_projection_after_svd: trials >= 1");
  LemmaReport rep{"projection_after_svd", trials, 0, 0.0};
  for (Index t = 0; t < trials; ++t) {
    const Index p1 = 4 + static_cast<Index>(rng.next_u64() % 27);  // 4..30
    const Index p2 = 4 + static_cast<Index>(rng.next_u64() % 27);
    const Index r = 1 + static_cast<Index>(rng.next_u64() % 3);
    const Matrix m = rng.gaussian_matrix(p1, r) * rng.gaussian_matrix(r, p2);
    Matrix e;
    switch (t % 4) {
      case 0:
        e = Matrix::Zero(p1, p2);
        break;
      case 1:
        e = -m;
        break;
      default:
        e = rng.gaussian_matrix(p1, p2) * (0.01 + rng.uniform());
    }
    const Matrix sum = m + e;
    OrthonormalBasis u_hat = max_abs(sum) == 0.0
                                 ? OrthonormalBasis(Matrix::Identity(p1, r))
                                 : svd_top_r(sum, r).u;
    const Matrix residual = m - u_hat.matrix() * (u_hat.matrix().transpose() * m);
    const double spec_e = spectral_norm(e);
    verify_detail::record(rep, spectral_norm(residual), 2.0 * spec_e);
    verify_detail::record(
        rep, frobenius_norm(residual),
        2.0 * std::min(std::sqrt(static_cast<double>(r)) * spec_e, frobenius_norm(e)));
  }
  return rep;
}

/// Result of the brute-force rank-one off-diagonal fit.
struct Rank1OracleResult {
  Vector u_star;
  double lambda_star = 0.0;
  double value = 0.0;  // min over unit u, scalar lambda of |Delta(lambda u u^T - s)|
};

namespace verify_detail {

// Spectral norm of the hollow symmetric matrix Delta(lambda u u^T - s),
// specialized per dimension. For p = 3 the characteristic cubic of a hollow
// matrix is t^3 - (x^2+y^2+z^2) t - 2xyz, solved trigonometrically; p = 4
// falls back to the dense eigensolver.
class HollowFitNorm {
 public:
  HollowFitNorm(const Vector& u, const Matrix& s_sym) : p_(s_sym.rows()) {
    if (p_ == 4) {
      uu_off_ = off_diagonal(u * u.transpose());
      s_off_ = off_diagonal(s_sym);
      return;
    }
    ux_ = u(0) * u(1);
    sx_ = s_sym(0, 1);
    if (p_ == 3) {
      uy_ = u(0) * u(2);
      uz_ = u(1) * u(2);
      sy_ = s_sym(0, 2);
      sz_ = s_sym(1, 2);
    }
  }

  double operator()(double lam) const {
    if (p_ == 2) return std::abs(lam * ux_ - sx_);
    if (p_ == 3) {
      const double x = lam * ux_ - sx_;
      const double y = lam * uy_ - sy_;
      const double z = lam * uz_ - sz_;
      const double q = x * x + y * y + z * z;
      if (q == 0.0) return 0.0;
      const double amp = 2.0 * std::sqrt(q / 3.0);
      double cosarg = 2.0 * x * y * z / (q * amp / 3.0);
      cosarg = std::clamp(cosarg, -1.0, 1.0);
      const double phi = std::acos(cosarg) / 3.0;
      // Extreme roots of the depressed cubic; the largest-modulus one is
      // either the largest or the smallest real root.
      const double t_max = amp * std::cos(phi);
      const double t_min = amp * std::cos(phi + 2.0 * M_PI / 3.0);
      return std::max(std::abs(t_max), std::abs(t_min));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(lam * uu_off_ - s_off_,
                                              Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
  }

 private:
  Index p_;
  double ux_ = 0, uy_ = 0, uz_ = 0;
  double sx_ = 0, sy_ = 0, sz_ = 0;
  Matrix uu_off_, s_off_;
};

// Golden-section minimization of lambda -> |Delta(lambda u u^T - s)|, which
// is convex in lambda.
inline std::pair<double, double> best_lambda(const Vector& u, const Matrix& s,
                                             double bracket) {
  const HollowFitNorm value_at(u, s);
  constexpr double kGolden = 0.6180339887498949;
  double lo = -bracket, hi = bracket;
  double c = hi - kGolden * (hi - lo), d = lo + kGolden * (hi - lo);
  double fc = value_at(c), fd = value_at(d);
  for (int it = 0; it < 72; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kGolden * (hi - lo);
      fc = value_at(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kGolden * (hi - lo);
      fd = value_at(d);
    }
  }
  return fc < fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

inline Vector unit_from_angles(const std::vector<double>& angles) {
  const std::size_t dim = angles.size() + 1;
  Vector u(static_cast<Index>(dim));
  double sin_prod = 1.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    u(static_cast<Index>(k)) = sin_prod * std::cos(angles[k]);
    sin_prod *= std::sin(angles[k]);
  }
  u(static_cast<Index>(dim - 1)) = sin_prod;
  return u;
}

}  // namespace verify_detail

/// Exhaustive minimizer of |Delta(lambda u u^T - s)| over unit vectors u and
/// scalars lambda, for p <= 4. Full spherical grid at a fixed coarse pitch,
/// then nested halving refinement around the best candidates down to
/// grid_step; halving grid_step only ever extends the evaluated set, so the
/// reported minimum is monotone under refinement.
inline Rank1OracleResult rank1_offdiag_oracle(const Matrix& s, double grid_step) {
  require_finite(s, "rank1_offdiag_oracle");
  require_square(s, "rank1_offdiag_oracle");
  const Index p = s.rows();
  if (p < 2 || p > 4) throw ParameterError("rank1_offdiag_oracle: need 2 <= p <= 4");
  if (!(grid_step > 0.0) || grid_step > 1e-2) {
    throw ParameterError("rank1_offdiag_oracle: need 0 < grid_step <= 1e-2");
  }
  const Matrix sym = 0.5 * (s + s.transpose());
  const double bracket = 8.0 * (1.0 + frobenius_norm(sym));
  const std::size_t n_angles = static_cast<std::size_t>(p - 1);
  // p = 4 pays a dense eigensolve per evaluation; keep its grid coarser.
  const double coarse = p == 4 ? 0.12 : 5e-3;

  struct Candidate {
    std::vector<double> angles;
    double value;
    double lambda;
  };
  const auto evaluate = [&](const std::vector<double>& angles) {
    const Vector u = verify_detail::unit_from_angles(angles);
    const auto [lam, val] = verify_detail::best_lambda(u, sym, bracket);
    return Candidate{angles, val, lam};
  };

  // Stage 1: full grid over the half sphere (u and -u are equivalent).
  std::vector<Candidate> best_pool;
  const std::size_t pool_cap = 24;
  std::vector<double> angles(n_angles, 0.0);
  const auto push_pool = [&](Candidate c) {
    best_pool.push_back(std::move(c));
    std::sort(best_pool.begin(), best_pool.end(),
              [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    if (best_pool.size() > pool_cap) best_pool.resize(pool_cap);
  };
  const std::size_t steps_full = static_cast<std::size_t>(std::ceil(M_PI / coarse));
  std::vector<std::size_t> counter(n_angles, 0);
  for (;;) {
    for (std::size_t k = 0; k < n_angles; ++k) {
      angles[k] = static_cast<double>(counter[k]) * coarse;
    }
    push_pool(evaluate(angles));
    std::size_t k = 0;
    for (; k < n_angles; ++k) {
      // Last angle spans only [0, pi) (antipodal symmetry); others [0, pi].
      const std::size_t limit = (k == n_angles - 1) ? steps_full - 1 : steps_full;
      if (counter[k] < limit) {
        ++counter[k];
        break;
      }
      counter[k] = 0;
    }
    if (k == n_angles) break;
  }

  // Stage 2: halving pattern refinement seeded at each pooled candidate.
  // The full {-step, 0, step}^d neighborhood is probed so ridges that are
  // diagonal in angle space do not stall the descent.
  std::vector<std::vector<double>> offsets(1, std::vector<double>{});
  for (std::size_t k = 0; k < n_angles; ++k) {
    std::vector<std::vector<double>> grown;
    for (const auto& base : offsets) {
      for (double d : {-1.0, 0.0, 1.0}) {
        auto next = base;
        next.push_back(d);
        grown.push_back(std::move(next));
      }
    }
    offsets = std::move(grown);
  }
  Candidate best = best_pool.front();
  for (const Candidate& seed : best_pool) {
    Candidate current = seed;
    for (double step = coarse / 2.0; step >= grid_step / 2.0; step /= 2.0) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (const auto& offset : offsets) {
          std::vector<double> probe = current.angles;
          bool moved = false;
          for (std::size_t k = 0; k < n_angles; ++k) {
            probe[k] += step * offset[k];
            moved = moved || offset[k] != 0.0;
          }
          if (!moved) continue;
          Candidate c = evaluate(probe);
          if (c.value < current.value) {
            current = std::move(c);
            improved = true;
          }
        }
      }
    }
    if (current.value < best.value) best = current;
  }
  return Rank1OracleResult{verify_detail::unit_from_angles(best.angles), best.lambda,
                           best.value};
}

/// Recovery behavior of the imputation iterations on controlled fixtures:
/// (a) perturbations confined to the diagonal are removed entirely,
/// (b) off-diagonal perturbation eps * lambda_r gives sin-theta <= 10 eps,
/// (c) perturbations confined to a known sparse symmetric set are removed
///     entirely by the generalized iteration.
inline LemmaReport check_robust_recovery(Index trials, RngStream& rng) {
  if (trials < 1) throw ParameterError("check_robust_recovery: trials >= 1");
  LemmaReport rep{"robust_recovery", trials, 0, 0.0};
  const Index sizes[] = {20, 50, 60};
  for (Index t = 0; t < trials; ++t) {
    const Index p = sizes[rng.next_u64() % 3];
    const Index r = 1 + static_cast<Index>(rng.next_u64() % 3);
    const OrthonormalBasis u = verify_detail::random_incoherent_basis(p, r, rng);
    Vector lambda(r);
    for (Index k = 0; k < r; ++k) lambda(k) = 1.0 + 2.0 * rng.uniform();
    std::sort(lambda.data(), lambda.data() + r, std::greater<double>());
    lambda(r - 1) = 1.0;  // pin lambda_r; condition number <= 3
    const Matrix m = u.matrix() * lambda.asDiagonal() * u.matrix().transpose();

    HeteroPcaConfig cfg;
    cfg.rank = r;
    cfg.max_iterations = 300;
    cfg.tolerance = 1e-13;

    // (a) diagonal-only perturbation of arbitrary amplitude.
    {
      Matrix z = Matrix::Zero(p, p);
      for (Index i = 0; i < p; ++i) z(i, i) = 6.0 * (rng.uniform() - 0.5);
      const HeteroPcaResult res = hetero_pca(m + z, cfg);
      verify_detail::record(rep, sin_theta(res.basis, u), 1e-8);
    }
    // (b) hollow symmetric perturbation at relative size eps.
    {
      const double eps = (t % 2 == 0) ? 0.01 : 0.05;
      Matrix z = verify_detail::random_square(p, rng, true);
      z.diagonal().setZero();
      z *= eps / spectral_norm(z);  // lambda_r(m) == 1
      const HeteroPcaResult res = hetero_pca(m + z, cfg);
      verify_detail::record(rep, sin_theta(res.basis, u), 10.0 * eps);
    }
    // (c) perturbation supported on a known symmetric sparse set.
    {
      const CorruptionSet g = verify_detail::random_sparse_set(p, 1, rng, true);
      Matrix z = Matrix::Zero(p, p);
      for (const auto& [i, j] : g.pairs()) {
        if (i <= j) {
          const double val = 2.0 * (rng.uniform() - 0.5);
          z(i, j) = val;
          z(j, i) = val;
        }
      }
      const HeteroPcaResult res = generalized_hetero_pca(m + z, g, cfg);
      verify_detail::record(rep, sin_theta(res.basis, u), 1e-8);
    }
  }
  return rep;
}

}  // namespace hpca

#endif  // HPCA_VERIFY_HPP_
