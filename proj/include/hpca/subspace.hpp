#ifndef HPCA_SUBSPACE_HPP_
#define HPCA_SUBSPACE_HPP_

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <utility>

#include "hpca/matrix.hpp"

namespace hpca {

/// p x r matrix with orthonormal columns. Validated on construction:
/// max-abs(U^T U - I) <= 1e-8 and 1 <= r <= p.
class OrthonormalBasis {
 public:
  static constexpr double kOrthoTolerance = 1e-8;

  explicit OrthonormalBasis(Matrix entries) : entries_(std::move(entries)) {
    require_finite(entries_, "OrthonormalBasis");
    const Index p = entries_.rows(), r = entries_.cols();
    if (r < 1 || r > p) {
      throw ParameterError("OrthonormalBasis: need 1 <= r <= p, got r=" +
                           std::to_string(r) + ", p=" + std::to_string(p));
    }
    const Matrix gram = entries_.transpose() * entries_ - Matrix::Identity(r, r);
    if (max_abs(gram) > kOrthoTolerance) {
      throw ParameterError("OrthonormalBasis: columns are not orthonormal");
    }
  }

  Index p() const { return entries_.rows(); }
  Index rank() const { return entries_.cols(); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

/// Spectral sin-theta distance between the column spans, equal to
/// sqrt(1 - s_r(U1^T U2)^2) and to |U2 - U1 (U1^T U2)| in spectral norm.
/// Computed in the latter (projected-residual) form: the sqrt form loses half
/// the significant digits near zero and cannot resolve distances below about
/// 1e-8, while the residual form reaches the 1e-15 scale needed to certify
/// exact recovery. In [0, 1]; symmetric and invariant under
/// right-multiplication of either argument by an orthogonal matrix.
inline double sin_theta(const OrthonormalBasis& u1, const OrthonormalBasis& u2) {
  if (u1.p() != u2.p() || u1.rank() != u2.rank()) {
    throw ParameterError("sin_theta: bases must share p and r");
  }
  const Matrix overlap = u1.matrix().transpose() * u2.matrix();
  const Matrix residual = u2.matrix() - u1.matrix() * overlap;
  Eigen::JacobiSVD<Matrix> svd(residual);
  // Roundoff can push the norm marginally above 1; clamp so orthogonal
  // subspaces give exactly 1.
  return std::min(1.0, svd.singularValues()(0));
}

/// Incoherence constant (p/r) * max_i |e_i^T U|^2, in [1, p/r].
/// 1 means the rows are perfectly spread, p/r means the basis is supported
/// on r coordinates.
inline double incoherence_constant(const OrthonormalBasis& u) {
  const double row_max = u.matrix().rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(u.p()) / static_cast<double>(u.rank()) * row_max;
}

}  // namespace hpca

#endif  // HPCA_SUBSPACE_HPP_
