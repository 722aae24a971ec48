#ifndef HPCA_MATRIX_HPP_
#define HPCA_MATRIX_HPP_

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "hpca/errors.hpp"

namespace hpca {

// Dense 64-bit real matrices are the universal carrier type.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw ParameterError(std::string(name) + ": entries must be finite");
  }
}

inline void require_square(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw ParameterError(std::string(name) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Max-abs asymmetry |A - A^T|; 0 for exactly symmetric input.
inline double asymmetry(const Matrix& m) {
  require_square(m, "asymmetry");
  return max_abs(m - m.transpose());
}

}  // namespace hpca

#endif  // HPCA_MATRIX_HPP_
