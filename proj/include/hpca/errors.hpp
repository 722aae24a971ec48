#ifndef HPCA_ERRORS_HPP_
#define HPCA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hpca {

/// Invalid argument: bad dimensions, out-of-range rank, malformed input.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Structurally degenerate input: rank-deficient QR input, empty off-diagonal, etc.
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure, reported with path context.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hpca

#endif  // HPCA_ERRORS_HPP_
