#ifndef HPCA_SVD_HPP_
#define HPCA_SVD_HPP_

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hpca/matrix.hpp"
#include "hpca/subspace.hpp"

namespace hpca {

/// Leading singular triplets of a dense matrix under a fixed sign convention.
struct SvdFactors {
  OrthonormalBasis u;
  Vector singular_values;  // sorted descending, >= 0
  OrthonormalBasis v;
  // Set when the retained spectrum is not separated from the discarded one:
  // s_r - s_{r+1} <= 1e-12 * s_1. The factors are still the deterministic
  // output of the backend; the subspace is just not uniquely defined.
  bool gap_warning = false;
};

namespace detail {

// Sign convention: per triplet, the entry of the left singular vector with
// the largest absolute value is nonnegative; ties break at the smallest row
// index. Removes all sign ambiguity from otherwise-unique triplets.
inline void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Index k = 0; k < u.cols(); ++k) {
    Index arg = 0;
    double best = std::abs(u(0, k));
    for (Index i = 1; i < u.rows(); ++i) {
      const double a = std::abs(u(i, k));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (u(arg, k) < 0.0) {
      u.col(k) = -u.col(k);
      v.col(k) = -v.col(k);
    }
  }
}

inline bool spectral_gap_closed(const Vector& s_all, Index r) {
  if (r >= s_all.size()) return false;
  return s_all(r - 1) - s_all(r) <= 1e-12 * s_all(0);
}

}  // namespace detail

/// Top-r singular triplets. Deterministic: identical input bits give
/// identical output bits (bidiagonal divide-and-conquer backend, with the
/// one-sided Jacobi fallback Eigen uses at small sizes).
inline SvdFactors svd_top_r(const Matrix& m, Index r) {
  require_finite(m, "svd_top_r");
  const Index n_min = std::min(m.rows(), m.cols());
  if (r < 1 || r > n_min) {
    throw ParameterError("svd_top_r: need 1 <= r <= min(rows, cols)");
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix u = svd.matrixU().leftCols(r);
  Matrix v = svd.matrixV().leftCols(r);
  detail::canonicalize_signs(u, v);
  return SvdFactors{OrthonormalBasis(std::move(u)),
                    svd.singularValues().head(r),
                    OrthonormalBasis(std::move(v)),
                    detail::spectral_gap_closed(svd.singularValues(), r)};
}

/// Best rank-r approximation sum_{i<=r} s_i u_i v_i^T (Eckart-Young).
inline Matrix rank_r_truncation(const Matrix& m, Index r) {
  SvdFactors f = svd_top_r(m, r);
  return f.u.matrix() * f.singular_values.asDiagonal() * f.v.matrix().transpose();
}

/// Largest singular value.
inline double spectral_norm(const Matrix& a) {
  require_finite(a, "spectral_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline double frobenius_norm(const Matrix& a) {
  require_finite(a, "frobenius_norm");
  return a.norm();
}

/// Q part of the QR factorization, with the diagonal of R nonnegative.
/// Requires full column rank: smallest singular value > 1e-12 * largest.
inline OrthonormalBasis qr_orthonormalize(const Matrix& a) {
  require_finite(a, "qr_orthonormalize");
  const Index p = a.rows(), r = a.cols();
  if (r < 1 || r > p) throw ParameterError("qr_orthonormalize: need 1 <= cols <= rows");
  {
    Eigen::JacobiSVD<Matrix> probe(a);
    const Vector& s = probe.singularValues();
    if (!(s(r - 1) > 1e-12 * s(0))) {
      throw DegeneracyError("qr_orthonormalize: input is rank-deficient");
    }
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(p, r);
  const Matrix rfac = q.transpose() * a;
  for (Index k = 0; k < r; ++k) {
    if (rfac(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return OrthonormalBasis(std::move(q));
}

/// Orthonormal basis with max_i |e_i^T Q|^2 <= 1 / floor(p/r), built by
/// stacking floor(p/r) identity blocks plus a partial block and rescaling
/// columns. Every row has exactly one nonzero entry.
inline OrthonormalBasis construct_incoherent_basis(Index p, Index r) {
  if (r < 1 || p < r) throw ParameterError("construct_incoherent_basis: need p >= r >= 1");
  const Index alpha = p / r;
  const Index beta = p - alpha * r;
  Matrix q = Matrix::Zero(p, r);
  for (Index blk = 0; blk < alpha; ++blk) {
    for (Index j = 0; j < r; ++j) q(blk * r + j, j) = 1.0;
  }
  for (Index j = 0; j < beta; ++j) q(alpha * r + j, j) = 1.0;
  for (Index j = 0; j < r; ++j) {
    const double scale =
        1.0 / std::sqrt(static_cast<double>(j < beta ? alpha + 1 : alpha));
    q.col(j) *= scale;
  }
  return OrthonormalBasis(std::move(q));
}

namespace detail {

enum class TruncationRule {
  // Keep the r eigenvalues of largest modulus: the singular-value (best
  // rank-r) truncation of a symmetric matrix.
  kLargestMagnitude,
  // Keep the r algebraically largest eigenvalues. Intended for iterations
  // whose target matrix is positive semidefinite (covariance/Gram): diagonal
  // deletion of a heavy-diagonal PSD matrix creates large negative
  // eigenvalues that magnitude ordering would otherwise latch onto.
  kLargestAlgebraic,
};

struct SymTopR {
  Vector eigenvalues;  // r retained eigenvalues, in rule order
  Matrix vectors;      // p x r
  bool gap_warning = false;
};

// Top-r eigenpairs of a symmetric matrix (only the lower triangle is read).
inline SymTopR sym_top_r(const Matrix& n, Index r, TruncationRule rule) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(n);
  const Vector& w = eig.eigenvalues();  // ascending
  const Index p = n.rows();
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  if (rule == TruncationRule::kLargestMagnitude) {
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      const double ma = std::abs(w(a)), mb = std::abs(w(b));
      if (ma != mb) return ma > mb;
      return w(a) > w(b);
    });
  } else {
    std::reverse(order.begin(), order.end());  // descending eigenvalues
  }
  SymTopR out;
  out.eigenvalues.resize(r);
  out.vectors.resize(p, r);
  for (Index k = 0; k < r; ++k) {
    out.eigenvalues(k) = w(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = eig.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  if (r < p) {
    const auto key = [&](Index k) {
      const double v = w(order[static_cast<std::size_t>(k)]);
      return rule == TruncationRule::kLargestMagnitude ? std::abs(v) : v;
    };
    const double top = std::abs(w(order[0]));
    out.gap_warning = key(r - 1) - key(r) <= 1e-12 * top;
  }
  return out;
}

}  // namespace detail

}  // namespace hpca

#endif  // HPCA_SVD_HPP_
