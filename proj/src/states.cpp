#include "qfilt/states.hpp"

#include <cmath>
#include <cstdio>

namespace qfilt {

ComplexVector fock_state(int dim, int n) {
  if (n < 0 || n >= dim) {
    throw DimensionError("fock_state: occupation exceeds truncation");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(n) = 1.0;
  return v;
}

ComplexVector fock_state(const FockSpace& space, const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != space.n_modes()) {
    throw DimensionError("fock_state: one occupation level per mode required");
  }
  ComplexVector v = ComplexVector::Ones(1);
  for (int m = 0; m < space.n_modes(); ++m) {
    v = detail::kron(v, fock_state(space.mode_dim(m), levels[m]));
  }
  return v;
}

ComplexVector coherent_state(int dim, Complex alpha,
                             const StateOptions& options) {
  ComplexVector v(dim);
  // c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), built recursively.
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < dim; ++n) {
    v(n) = c;
    c *= alpha / std::sqrt(static_cast<Real>(n + 1));
  }
  const Real kept = v.squaredNorm();
  const Real tail = 1.0 - kept;
  if (tail > options.tail_tol && options.tail_policy != TailPolicy::Ignore) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "coherent_state: truncation tail mass %.3e exceeds %.3e at "
                  "dim %d, |alpha|^2 = %.3f",
                  tail, options.tail_tol, dim, std::norm(alpha));
    if (options.tail_policy == TailPolicy::Throw) {
      throw TruncationError(msg);
    }
    std::fprintf(stderr, "warning: %s\n", msg);
  }
  return v / std::sqrt(kept);
}

ComplexVector superpose(const std::vector<Complex>& weights,
                        const std::vector<ComplexVector>& states) {
  if (weights.empty() || weights.size() != states.size()) {
    throw DimensionError("superpose: weights and states must pair up");
  }
  ComplexVector v = ComplexVector::Zero(states[0].size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (states[k].size() != v.size()) {
      throw DimensionError("superpose: state dimensions differ");
    }
    v += weights[k] * states[k];
  }
  const Real n = v.norm();
  if (n == 0.0) {
    throw std::invalid_argument("superpose: zero vector");
  }
  return v / n;
}

ComplexVector product_state(const std::vector<ComplexVector>& mode_states) {
  if (mode_states.empty()) {
    throw DimensionError("product_state: no factors");
  }
  ComplexVector v = ComplexVector::Ones(1);
  for (const auto& s : mode_states) {
    v = detail::kron(v, s);
  }
  return v;
}

DensityOperator DensityOperator::from_state(const ComplexVector& psi) {
  const Real n2 = psi.squaredNorm();
  if (n2 == 0.0) {
    throw std::invalid_argument("DensityOperator: zero state vector");
  }
  return DensityOperator(ComplexMatrix(psi * psi.adjoint() / n2));
}

Real DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(matrix),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityOperator::validate() const {
  require_square(matrix, "DensityOperator");
  if (!all_finite(matrix.real()) || !all_finite(matrix.imag())) {
    throw DivergenceError("DensityOperator: non-finite entries");
  }
  if (hermiticity_defect(matrix) > 1e-10) {
    throw std::runtime_error("DensityOperator: not Hermitian within 1e-10");
  }
  if (std::abs(matrix.trace().real() - 1.0) > 1e-8 ||
      std::abs(matrix.trace().imag()) > 1e-8) {
    throw std::runtime_error("DensityOperator: trace differs from 1 beyond 1e-8");
  }
  if (min_eigenvalue() < -1e-8) {
    throw std::runtime_error("DensityOperator: negative eigenvalue below -1e-8");
  }
}

Complex expectation(const ComplexMatrix& rho, const ComplexMatrix& x) {
  require_same_dim(rho, x, "expectation");
  // tr(rho X) without forming the product.
  return (rho.transpose().cwiseProduct(x)).sum();
}

Complex expectation(const DensityOperator& rho, const ComplexMatrix& x) {
  return expectation(rho.matrix, x);
}

Real real_expectation(const ComplexMatrix& rho, const ComplexMatrix& x,
                      Real tol) {
  const Complex v = expectation(rho, x);
  if (std::abs(v.imag()) > tol) {
    throw std::runtime_error(
        "real_expectation: imaginary part exceeds tolerance");
  }
  return v.real();
}

}  // namespace qfilt
