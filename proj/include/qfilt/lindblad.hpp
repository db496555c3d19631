#pragma once

#include <vector>

#include "qfilt/types.hpp"

namespace qfilt {

/// Heisenberg-picture Markovian generator with hbar = 1:
///   L(X) = -i [X, H] + sum_k ( Lk^dag X Lk - (Lk^dag Lk X + X Lk^dag Lk)/2 ).
ComplexMatrix lindblad_heisenberg(const ComplexMatrix& x,
                                  const ComplexMatrix& h,
                                  const std::vector<ComplexMatrix>& ls);

/// Adjoint (Schroedinger-picture) generator:
///   L*(rho) = -i [H, rho] + sum_k ( Lk rho Lk^dag - {Lk^dag Lk, rho}/2 ).
ComplexMatrix lindblad_schrodinger(const ComplexMatrix& rho,
                                   const ComplexMatrix& h,
                                   const std::vector<ComplexMatrix>& ls);

}  // namespace qfilt
