#include "qfilt/slh.hpp"

#include <cmath>

namespace qfilt::slh {

void SLHTriple::validate() const {
  const auto m = static_cast<Eigen::Index>(couplings.size());
  if (scattering.rows() != m || scattering.cols() != m) {
    throw DimensionError("SLHTriple: scattering matrix does not match channel count");
  }
  const ComplexMatrix eye = ComplexMatrix::Identity(m, m);
  if ((scattering * scattering.adjoint() - eye).cwiseAbs().maxCoeff() > 1e-10 ||
      (scattering.adjoint() * scattering - eye).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::runtime_error("SLHTriple: scattering matrix not unitary within 1e-10");
  }
  if (hermiticity_defect(hamiltonian) > 1e-10) {
    throw std::runtime_error("SLHTriple: Hamiltonian not Hermitian within 1e-10");
  }
  const int d = space.total_dim();
  if (hamiltonian.rows() != d) {
    throw DimensionError("SLHTriple: Hamiltonian does not act on the system space");
  }
  for (const auto& l : couplings) {
    if (l.rows() != d || l.cols() != d) {
      throw DimensionError("SLHTriple: coupling operator dimension mismatch");
    }
  }
}

SLHTriple trivial_system(const FockSpace& space, int n_channels) {
  SLHTriple g{ComplexMatrix::Identity(n_channels, n_channels),
              std::vector<ComplexMatrix>(
                  n_channels, ComplexMatrix::Zero(space.total_dim(), space.total_dim())),
              ComplexMatrix::Zero(space.total_dim(), space.total_dim()), space};
  return g;
}

SLHTriple concatenate(const SLHTriple& g1, const SLHTriple& g2) {
  if (!(g1.space == g2.space)) {
    throw DimensionError("concatenate: components live on different spaces");
  }
  const int m1 = g1.n_channels();
  const int m2 = g2.n_channels();
  ComplexMatrix s = ComplexMatrix::Zero(m1 + m2, m1 + m2);
  s.topLeftCorner(m1, m1) = g1.scattering;
  s.bottomRightCorner(m2, m2) = g2.scattering;
  std::vector<ComplexMatrix> l = g1.couplings;
  l.insert(l.end(), g2.couplings.begin(), g2.couplings.end());
  return SLHTriple{std::move(s), std::move(l),
                   g1.hamiltonian + g2.hamiltonian, g1.space};
}

SLHTriple series(const SLHTriple& downstream, const SLHTriple& upstream) {
  if (!(downstream.space == upstream.space)) {
    throw DimensionError("series: components live on different spaces");
  }
  if (downstream.n_channels() != upstream.n_channels()) {
    throw DimensionError("series: channel counts differ");
  }
  const int m = upstream.n_channels();
  const ComplexMatrix& s2 = downstream.scattering;
  ComplexMatrix s = s2 * upstream.scattering;

  std::vector<ComplexMatrix> l(m);
  for (int i = 0; i < m; ++i) {
    ComplexMatrix li = downstream.couplings[i];
    for (int j = 0; j < m; ++j) {
      li += s2(i, j) * upstream.couplings[j];
    }
    l[i] = std::move(li);
  }

  // Hamiltonian correction Im(L2^dag S2 L1) with Im(X) = (X - X^dag)/(2i).
  const int d = upstream.space.total_dim();
  ComplexMatrix cross = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      cross += downstream.couplings[i].adjoint() * s2(i, j) * upstream.couplings[j];
    }
  }
  ComplexMatrix h = upstream.hamiltonian + downstream.hamiltonian +
                    (cross - cross.adjoint()) / (2.0 * kI);
  return SLHTriple{std::move(s), std::move(l), std::move(h), upstream.space};
}

ComplexMatrix beam_splitter(Real r) {
  if (r < 0.0 || r > 1.0) {
    throw std::invalid_argument("beam_splitter: r must lie in [0, 1]");
  }
  const Real t = std::sqrt(1.0 - r * r);
  ComplexMatrix s(2, 2);
  s << Complex{t, 0.0}, Complex{0.0, r}, Complex{0.0, r}, Complex{t, 0.0};
  return s;
}

}  // namespace qfilt::slh
