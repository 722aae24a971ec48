#ifndef HPCA_STRUCTURE_HPP_
#define HPCA_STRUCTURE_HPP_

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "hpca/matrix.hpp"

namespace hpca {

/// A with its diagonal set to zero.
inline Matrix off_diagonal(const Matrix& a) {
  require_square(a, "off_diagonal");
  Matrix out = a;
  out.diagonal().setZero();
  return out;
}

/// A with all off-diagonal entries set to zero. off_diagonal(a) + diag_part(a) == a.
inline Matrix diag_part(const Matrix& a) {
  require_square(a, "diag_part");
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  out.diagonal() = a.diagonal();
  return out;
}

/// Index set of entries treated as corrupted, with per-row/per-column sparsity
/// metadata. Pairs are stored sorted and deduplicated.
class CorruptionSet {
 public:
  using Pair = std::pair<Index, Index>;

  CorruptionSet(Index rows, Index cols, std::vector<Pair> pairs)
      : rows_(rows), cols_(cols), pairs_(std::move(pairs)) {
    if (rows_ < 1 || cols_ < 1) throw ParameterError("CorruptionSet: empty shape");
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    std::vector<Index> row_count(rows_, 0), col_count(cols_, 0);
    for (const auto& [i, j] : pairs_) {
      if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
        throw ParameterError("CorruptionSet: index out of range");
      }
      ++row_count[static_cast<std::size_t>(i)];
      ++col_count[static_cast<std::size_t>(j)];
    }
    for (Index c : row_count) b_ = std::max(b_, c);
    for (Index c : col_count) b_ = std::max(b_, c);
  }

  /// The diagonal {(i,i)}; Algorithm inputs without an explicit set use this.
  static CorruptionSet diagonal(Index p) {
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) pairs.emplace_back(i, i);
    return CorruptionSet(p, p, std::move(pairs));
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const std::vector<Pair>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }

  /// b-sparsity: max entries per row or per column (0 for the empty set).
  Index sparsity_b() const { return b_; }

  /// Closed under (i,j) -> (j,i). Requires a square shape.
  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (const auto& [i, j] : pairs_) {
      if (i != j && !std::binary_search(pairs_.begin(), pairs_.end(), Pair{j, i})) {
        return false;
      }
    }
    return true;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Index b_ = 0;
  std::vector<Pair> pairs_;
};

/// G(a): entries in the set kept, all others zero.
inline Matrix mask_part(const Matrix& a, const CorruptionSet& g) {
  if (a.rows() != g.rows() || a.cols() != g.cols()) {
    throw ParameterError("mask_part: matrix shape does not match corruption set");
  }
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto& [i, j] : g.pairs()) out(i, j) = a(i, j);
  return out;
}

/// Gamma(a) = a - G(a): entries in the set zeroed, all others kept.
inline Matrix gamma_part(const Matrix& a, const CorruptionSet& g) {
  if (a.rows() != g.rows() || a.cols() != g.cols()) {
    throw ParameterError("gamma_part: matrix shape does not match corruption set");
  }
  Matrix out = a;
  for (const auto& [i, j] : g.pairs()) out(i, j) = 0.0;
  return out;
}

/// Upper bound sqrt(min(b, 2r)) on the masking constant
/// max { |G(H)| / |H| : rank(H) <= 2r }. The exact constant is a max over
/// rank-2r matrices and is not computed.
inline double eta_upper_bound(const CorruptionSet& g, Index rank) {
  if (rank < 1) throw ParameterError("eta_upper_bound: rank must be >= 1");
  const double b = static_cast<double>(g.sparsity_b());
  return std::sqrt(std::min(b, 2.0 * static_cast<double>(rank)));
}

}  // namespace hpca

#endif  // HPCA_STRUCTURE_HPP_
