#ifndef HPCA_ESTIMATORS_HPP_
#define HPCA_ESTIMATORS_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hpca/matrix.hpp"
#include "hpca/structure.hpp"
#include "hpca/subspace.hpp"
#include "hpca/svd.hpp"

namespace hpca {

/// How the rank-r step of the imputation loop picks eigenvalues of the
/// symmetric iterate.
enum class TruncationRule {
  /// Largest modulus: the literal best rank-r (singular value) truncation.
  kLargestMagnitude,
  /// Algebraically largest: for PSD targets (covariance / Gram estimation).
  /// Heavy-diagonal inputs acquire large negative eigenvalues once the
  /// corrupted entries are zeroed; magnitude ordering can lock onto those
  /// artifacts outside the incoherent regime, this rule does not.
  kLargestAlgebraic,
};

struct HeteroPcaConfig {
  Index rank = 1;
  Index max_iterations = 1000;
  // Relative change of the imputed entries between iterations; the loop stops
  // once max-abs change <= tolerance * (1 + max-abs of the kept entries).
  double tolerance = 1e-9;
  // Absent: impute the diagonal (Algorithm input without an explicit set).
  std::optional<CorruptionSet> corruption;
  TruncationRule truncation = TruncationRule::kLargestMagnitude;
};

struct HeteroPcaResult {
  OrthonormalBasis basis;
  Index iterations_used = 0;
  std::vector<double> diag_residual_history;  // max-abs imputed change per iteration
  bool converged = false;
  bool gap_warning = false;
  // Last iterate N^(T); its kept entries equal the input's, its imputed
  // entries are the fixed point the loop reached. Used by the diagnostics
  // and the objective-value checks.
  Matrix final_iterate;
};

namespace detail {

inline detail::TruncationRule internal_rule(hpca::TruncationRule r) {
  return r == hpca::TruncationRule::kLargestMagnitude
             ? detail::TruncationRule::kLargestMagnitude
             : detail::TruncationRule::kLargestAlgebraic;
}

// Shared loop for diagonal and general corruption sets. `s` must already be
// symmetric; `g` symmetric as a set.
inline HeteroPcaResult impute_and_decompose(const Matrix& s, const CorruptionSet& g,
                                            const HeteroPcaConfig& cfg) {
  const Index p = s.rows();
  if (cfg.rank < 1 || cfg.rank > p) {
    throw ParameterError("hetero_pca: need 1 <= rank <= p");
  }
  if (cfg.max_iterations < 1) throw ParameterError("hetero_pca: max_iterations >= 1");
  if (!(cfg.tolerance >= 0.0)) throw ParameterError("hetero_pca: tolerance >= 0");

  Matrix n = gamma_part(s, g);
  if (max_abs(n) == 0.0) {
    throw DegeneracyError(
        "hetero_pca: kept entries are identically zero (off-diagonal "
        "information empty)");
  }
  const double scale = 1.0 + max_abs(n);
  const auto rule = internal_rule(cfg.truncation);
  const auto& pairs = g.pairs();

  HeteroPcaResult out{OrthonormalBasis(Matrix::Identity(p, cfg.rank)), 0, {}, false,
                      false, Matrix()};
  for (Index t = 0; t < cfg.max_iterations; ++t) {
    const detail::SymTopR top = detail::sym_top_r(n, cfg.rank, rule);
    // Rank-r iterate evaluated only on the imputed entries.
    double residual = 0.0;
    std::vector<double> imputed(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      double v = 0.0;
      for (Index c = 0; c < cfg.rank; ++c) {
        // Grouped so (i,j) and (j,i) accumulate bit-identical values and the
        // iterate stays exactly symmetric.
        v += top.eigenvalues(c) * (top.vectors(i, c) * top.vectors(j, c));
      }
      imputed[k] = v;
      residual = std::max(residual, std::abs(v - n(i, j)));
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      n(i, j) = imputed[k];
    }
    out.diag_residual_history.push_back(residual);
    out.iterations_used = t + 1;
    if (residual <= cfg.tolerance * scale) {
      out.converged = true;
      break;
    }
  }

  const detail::SymTopR final_top = detail::sym_top_r(n, cfg.rank, rule);
  Matrix u = final_top.vectors;
  Matrix v_sign = u;  // right factor differs from u only by eigenvalue signs
  detail::canonicalize_signs(u, v_sign);
  out.basis = OrthonormalBasis(std::move(u));
  out.gap_warning = final_top.gap_warning;
  out.final_iterate = std::move(n);
  return out;
}

inline Matrix symmetrized_input(const Matrix& s, const char* name) {
  require_finite(s, name);
  require_square(s, name);
  if (asymmetry(s) > 1e-8) {
    throw ParameterError(std::string(name) + ": input exceeds the 1e-8 symmetry tolerance");
  }
  return 0.5 * (s + s.transpose());
}

}  // namespace detail

/// Iterative diagonal imputation: start from the input with corrupted entries
/// zeroed, then repeatedly replace them with the corresponding entries of the
/// current rank-r approximation until they stop moving. Returns the leading-r
/// eigenbasis of the final iterate. The output is invariant, bit for bit,
/// to any change of the input confined to the imputed entries.
inline HeteroPcaResult hetero_pca(const Matrix& s, const HeteroPcaConfig& cfg) {
  const Matrix sym = detail::symmetrized_input(s, "hetero_pca");
  if (cfg.corruption.has_value()) {
    const CorruptionSet& g = *cfg.corruption;
    if (g.rows() != sym.rows() || g.cols() != sym.cols()) {
      throw ParameterError("hetero_pca: corruption set shape mismatch");
    }
    if (!g.is_symmetric()) {
      throw ParameterError("hetero_pca: corruption set must be symmetric");
    }
    return detail::impute_and_decompose(sym, g, cfg);
  }
  return detail::impute_and_decompose(sym, CorruptionSet::diagonal(sym.rows()), cfg);
}

/// Imputation over an arbitrary symmetric index set; with the diagonal set
/// this reduces to hetero_pca exactly (identical iterate sequence).
inline HeteroPcaResult generalized_hetero_pca(const Matrix& n, const CorruptionSet& g,
                                              const HeteroPcaConfig& cfg) {
  const Matrix sym = detail::symmetrized_input(n, "generalized_hetero_pca");
  if (g.rows() != sym.rows() || g.cols() != sym.cols()) {
    throw ParameterError("generalized_hetero_pca: corruption set shape mismatch");
  }
  if (!g.is_symmetric()) {
    throw ParameterError("generalized_hetero_pca: corruption set must be symmetric");
  }
  return detail::impute_and_decompose(sym, g, cfg);
}

/// Leading r left singular vectors of s, no bias correction.
inline OrthonormalBasis regular_svd_estimator(const Matrix& s, Index r) {
  return svd_top_r(s, r).u;
}

/// Leading r left singular vectors of s with the diagonal zeroed first.
inline OrthonormalBasis diagonal_deletion_estimator(const Matrix& s, Index r) {
  return svd_top_r(off_diagonal(s), r).u;
}

/// Centered sample covariance with the n-1 denominator. Exactly symmetric
/// and translation invariant.
inline Matrix sample_covariance(const Matrix& y) {
  require_finite(y, "sample_covariance");
  const Index n = y.cols();
  if (n < 2) throw ParameterError("sample_covariance: need at least 2 samples");
  const Matrix centered = y.colwise() - y.rowwise().mean();
  Matrix cov = Matrix::Zero(y.rows(), y.rows());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / static_cast<double>(n - 1));
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov;
}

/// Y Y^T, exactly symmetric, PSD.
inline Matrix gram(const Matrix& y) {
  require_finite(y, "gram");
  Matrix g = Matrix::Zero(y.rows(), y.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0);
  g = g.selfadjointView<Eigen::Lower>();
  return g;
}

struct PairwiseCovariance {
  Matrix cov;
  // Unordered (i < j) pairs that are never co-observed; their entries are 0.
  std::int64_t zero_overlap_pairs = 0;
};

/// Covariance from incomplete samples: entry (i,j) uses only the samples
/// where both coordinates are observed, centered at the per-row observed
/// means, divided by the co-observation count (no n-1 correction).
inline PairwiseCovariance pairwise_complete_covariance(const Matrix& y, const Matrix& r_mask) {
  require_finite(y, "pairwise_complete_covariance");
  const Index p = y.rows(), n = y.cols();
  if (r_mask.rows() != p || r_mask.cols() != n) {
    throw ParameterError("pairwise_complete_covariance: mask shape mismatch");
  }
  for (Index i = 0; i < p; ++i) {
    for (Index k = 0; k < n; ++k) {
      const double m = r_mask(i, k);
      if (m != 0.0 && m != 1.0) {
        throw ParameterError("pairwise_complete_covariance: mask entries must be 0 or 1");
      }
    }
  }
  Vector row_mean(p);
  for (Index i = 0; i < p; ++i) {
    double sum = 0.0, count = 0.0;
    for (Index k = 0; k < n; ++k) {
      sum += y(i, k) * r_mask(i, k);
      count += r_mask(i, k);
    }
    if (count == 0.0) {
      throw DegeneracyError("pairwise_complete_covariance: row " + std::to_string(i) +
                            " has no observed entries");
    }
    row_mean(i) = sum / count;
  }
  PairwiseCovariance out{Matrix::Zero(p, p), 0};
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      double acc = 0.0, overlap = 0.0;
      for (Index k = 0; k < n; ++k) {
        const double both = r_mask(i, k) * r_mask(j, k);
        acc += (y(i, k) - row_mean(i)) * (y(j, k) - row_mean(j)) * both;
        overlap += both;
      }
      if (overlap == 0.0) {
        if (i != j) ++out.zero_overlap_pairs;
        continue;  // entry stays 0
      }
      out.cov(i, j) = acc / overlap;
      out.cov(j, i) = out.cov(i, j);
    }
  }
  return out;
}

/// Rank-r reconstruction U U^T Y V V^T from estimated singular subspaces.
inline Matrix reconstruct_low_rank(const Matrix& y, const OrthonormalBasis& u_hat,
                                   const OrthonormalBasis& v_hat) {
  require_finite(y, "reconstruct_low_rank");
  if (u_hat.p() != y.rows() || v_hat.p() != y.cols()) {
    throw ParameterError("reconstruct_low_rank: basis dimensions do not match y");
  }
  const Matrix core = u_hat.matrix().transpose() * y * v_hat.matrix();
  return u_hat.matrix() * core * v_hat.matrix().transpose();
}

}  // namespace hpca

#endif  // HPCA_ESTIMATORS_HPP_
