#pragma once

#include <vector>

#include "qfilt/fock.hpp"
#include "qfilt/types.hpp"

namespace qfilt {

/// What to do when a coherent amplitude carries non-negligible weight above
/// the truncation level.
enum class TailPolicy { Ignore, Warn, Throw };

struct StateOptions {
  Real tail_tol = 1e-6;
  TailPolicy tail_policy = TailPolicy::Warn;
};

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |n> on a single mode of dimension dim.
ComplexVector fock_state(int dim, int n);

/// Product Fock state with the given per-mode occupation levels.
ComplexVector fock_state(const FockSpace& space, const std::vector<int>& levels);

/// Truncated coherent state, renormalized. The pre-normalization tail mass
/// above the cutoff is checked against options.tail_tol.
ComplexVector coherent_state(int dim, Complex alpha,
                             const StateOptions& options = {});

/// Normalized weighted sum of state vectors.
ComplexVector superpose(const std::vector<Complex>& weights,
                        const std::vector<ComplexVector>& states);

/// Product state over modes.
ComplexVector product_state(const std::vector<ComplexVector>& mode_states);

/// Density operator with value semantics. Construction does not validate;
/// call validate() to enforce the Hermiticity/trace/positivity tolerances.
struct DensityOperator {
  ComplexMatrix matrix;

  DensityOperator() = default;
  explicit DensityOperator(ComplexMatrix m) : matrix(std::move(m)) {}

  static DensityOperator from_state(const ComplexVector& psi);

  Eigen::Index dim() const { return matrix.rows(); }

  /// Checks Hermiticity (1e-10), unit trace (1e-8) and min eigenvalue
  /// >= -1e-8 after symmetrization; throws on violation.
  void validate() const;

  Real min_eigenvalue() const;
};

/// tr(rho X).
Complex expectation(const DensityOperator& rho, const ComplexMatrix& x);
Complex expectation(const ComplexMatrix& rho, const ComplexMatrix& x);

/// tr(rho X) for Hermitian X; the imaginary part must be below tol and is
/// discarded.
Real real_expectation(const ComplexMatrix& rho, const ComplexMatrix& x,
                      Real tol = 1e-10);

}  // namespace qfilt
