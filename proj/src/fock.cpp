#include "qfilt/fock.hpp"

#include <cmath>
#include <numeric>

namespace qfilt {

FockSpace::FockSpace(std::vector<int> mode_dims)
    : mode_dims_(std::move(mode_dims)) {
  if (mode_dims_.empty()) {
    throw DimensionError("FockSpace: needs at least one mode");
  }
  total_dim_ = 1;
  for (int d : mode_dims_) {
    if (d < 2) {
      throw DimensionError("FockSpace: every mode dimension must be >= 2");
    }
    total_dim_ *= d;
  }
}

int FockSpace::mode_dim(int mode) const {
  if (mode < 0 || mode >= n_modes()) {
    throw DimensionError("FockSpace: mode index out of range");
  }
  return mode_dims_[mode];
}

namespace detail {

ComplexMatrix annihilation_single(int dim) {
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<Real>(n));
  }
  return a;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

}  // namespace detail

ComplexMatrix identity(const FockSpace& space) {
  return ComplexMatrix::Identity(space.total_dim(), space.total_dim());
}

ComplexMatrix tensor_embed(const ComplexMatrix& op, int mode,
                           const FockSpace& space) {
  if (op.rows() != space.mode_dim(mode) || op.cols() != space.mode_dim(mode)) {
    throw DimensionError("tensor_embed: operator does not match mode dimension");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int m = 0; m < space.n_modes(); ++m) {
    if (m == mode) {
      out = detail::kron(out, op);
    } else {
      const int d = space.mode_dim(m);
      out = detail::kron(out, ComplexMatrix::Identity(d, d));
    }
  }
  return out;
}

ComplexMatrix annihilation(const FockSpace& space, int mode) {
  return tensor_embed(detail::annihilation_single(space.mode_dim(mode)), mode,
                      space);
}

ComplexMatrix number_operator(const FockSpace& space, int mode) {
  const ComplexMatrix a = detail::annihilation_single(space.mode_dim(mode));
  return tensor_embed(ComplexMatrix(a.adjoint() * a), mode, space);
}

std::pair<ComplexMatrix, ComplexMatrix> quadratures(const FockSpace& space,
                                                    int mode) {
  const ComplexMatrix a = annihilation(space, mode);
  const Real s = 1.0 / std::sqrt(2.0);
  ComplexMatrix q = s * (a + a.adjoint());
  ComplexMatrix p = -kI * s * (a - a.adjoint());
  return {std::move(q), std::move(p)};
}

std::vector<int> interior_indices(const FockSpace& space) {
  std::vector<int> out;
  const int total = space.total_dim();
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    bool interior = true;
    for (int m = space.n_modes() - 1; m >= 0; --m) {
      const int d = space.mode_dim(m);
      const int level = rem % d;
      rem /= d;
      if (level == d - 1) {
        interior = false;
        break;
      }
    }
    if (interior) {
      out.push_back(idx);
    }
  }
  return out;
}

ComplexMatrix restrict_to(const ComplexMatrix& m,
                          const std::vector<int>& indices) {
  ComplexMatrix out(indices.size(), indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = 0; j < indices.size(); ++j) {
      out(i, j) = m(indices[i], indices[j]);
    }
  }
  return out;
}

}  // namespace qfilt
