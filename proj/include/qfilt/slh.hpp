#pragma once

#include <vector>

#include "qfilt/fock.hpp"
#include "qfilt/types.hpp"

namespace qfilt::slh {

/// Open-system component (S, L, H) on a truncated Fock space. S is an m x m
/// scalar scattering matrix (each entry multiplies the identity on the system
/// space), L holds the m coupling operators, H is the Hamiltonian.
struct SLHTriple {
  ComplexMatrix scattering;              // m x m, unitary
  std::vector<ComplexMatrix> couplings;  // m operators on the system space
  ComplexMatrix hamiltonian;             // Hermitian
  FockSpace space;

  int n_channels() const { return static_cast<int>(couplings.size()); }

  /// Enforces S unitarity and H Hermiticity within 1e-10.
  void validate() const;
};

/// Identity component with m pass-through channels and no dynamics.
SLHTriple trivial_system(const FockSpace& space, int n_channels);

/// Concatenation product: block-diagonal S, stacked L, summed H.
SLHTriple concatenate(const SLHTriple& g1, const SLHTriple& g2);

/// Series product feeding `upstream` into `downstream` (equal channel
/// counts): S = S2 S1, L = L2 + S2 L1, H = H1 + H2 + Im(L2^dag S2 L1).
SLHTriple series(const SLHTriple& downstream, const SLHTriple& upstream);

/// Two-port beam splitter with reflectivity r^2:
///   [ sqrt(1-r^2)   i r        ]
///   [ i r           sqrt(1-r^2)].
ComplexMatrix beam_splitter(Real r);

}  // namespace qfilt::slh
