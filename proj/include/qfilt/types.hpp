#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qfilt {

using Real = double;
using Complex = std::complex<Real>;

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Thrown when matrix shapes do not line up.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a linear solve hits a numerically singular matrix.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an integrator or filter produced non-finite values.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline ComplexMatrix hermitize(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

inline RealMatrix symmetrize(const RealMatrix& m) {
  return 0.5 * (m + m.transpose());
}

inline Real hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, Real tol = 1e-10) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

inline void require_square(const ComplexMatrix& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(what + ": matrix is not square");
  }
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                             const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(what + ": dimension mismatch");
  }
}

}  // namespace qfilt
