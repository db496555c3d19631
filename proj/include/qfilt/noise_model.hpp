#pragma once

#include <functional>
#include <vector>

#include "qfilt/sme.hpp"
#include "qfilt/types.hpp"

namespace qfilt::scenarios {

/// Measurement statistics of a linearly coupled component evaluated from the
/// quantum Ito table at commuting estimates. The component couples through
/// L0_k = c_k^T x (columns of `coupling_coeffs`), scatters its outputs
/// through the unitary `scattering`, and each output channel carries either a
/// homodyne or a counting detector. Everything downstream (Q, R, S, h, H) is
/// generated from this data instead of being entered by hand.
struct NoiseModel {
  RealMatrix Q;  // constant process covariance per unit time
  std::function<RealMatrix(const RealVector&)> R;
  std::function<RealMatrix(const RealVector&)> S;
  std::function<RealVector(const RealVector&)> h;
  std::function<RealMatrix(const RealVector&)> H;
  ComplexMatrix G;  // QSDE noise coefficient matrix [x, L] S^*
};

/// `coupling_coeffs` is n x m complex (state dimension x channels) giving the
/// pre-scattering couplings; `kinds[k]` assigns the detector on SLH channel k.
/// Counting-channel variances are floored at `intensity_floor` to keep R
/// positive definite near the origin.
NoiseModel build_noise_model(const ComplexMatrix& coupling_coeffs,
                             const ComplexMatrix& scattering,
                             const std::vector<sme::DetectorKind>& kinds,
                             Real intensity_floor = 1e-6);

/// Block-diagonal symplectic form with [q_i, p_i] = i: J = diag([[0,1],[-1,0]]).
RealMatrix symplectic_form(int n_modes);

}  // namespace qfilt::scenarios
