#pragma once

#include <utility>
#include <vector>

#include "qfilt/types.hpp"

namespace qfilt {

/// Truncated multi-mode Fock space. Operators on the composite space are
/// dense matrices of dimension prod(mode_dims).
class FockSpace {
 public:
  explicit FockSpace(std::vector<int> mode_dims);
  explicit FockSpace(int single_mode_dim)
      : FockSpace(std::vector<int>{single_mode_dim}) {}

  int n_modes() const { return static_cast<int>(mode_dims_.size()); }
  int mode_dim(int mode) const;
  const std::vector<int>& mode_dims() const { return mode_dims_; }
  int total_dim() const { return total_dim_; }

  bool operator==(const FockSpace& other) const {
    return mode_dims_ == other.mode_dims_;
  }

 private:
  std::vector<int> mode_dims_;
  int total_dim_;
};

/// Identity on the composite space.
ComplexMatrix identity(const FockSpace& space);

/// Kronecker embedding of a single-mode operator, identity on other modes.
ComplexMatrix tensor_embed(const ComplexMatrix& op, int mode,
                           const FockSpace& space);

/// Ladder operator acting as sqrt(n) |n-1><n| in the given mode.
ComplexMatrix annihilation(const FockSpace& space, int mode);

/// a^dag a in the given mode.
ComplexMatrix number_operator(const FockSpace& space, int mode);

/// Quadratures with a = (q + i p)/sqrt(2): [q, p] = i, vacuum variance 1/2.
std::pair<ComplexMatrix, ComplexMatrix> quadratures(const FockSpace& space,
                                                    int mode);

/// Basis indices whose occupation stays below the top truncation level in
/// every mode. Ladder-operator identities hold exactly on these.
std::vector<int> interior_indices(const FockSpace& space);

/// Restricts a matrix to rows/columns in `indices`.
ComplexMatrix restrict_to(const ComplexMatrix& m,
                          const std::vector<int>& indices);

namespace detail {
ComplexMatrix annihilation_single(int dim);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);
}  // namespace detail

}  // namespace qfilt
