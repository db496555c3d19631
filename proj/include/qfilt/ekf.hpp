#pragma once

#include <functional>
#include <optional>

#include "qfilt/types.hpp"

namespace qfilt::ekf {

/// Classical representation of the filter problem. Conventional Kalman
/// symbols: f/F drift and its Jacobian, h/H output map and its Jacobian,
/// Q process noise, R measurement noise (positive definite for every
/// evaluated estimate), S process-measurement cross covariance. All are
/// evaluated at the current estimate, so state-dependent noise models fit
/// the same interface.
struct FilterModel {
  Eigen::Index n = 0;  // state dimension
  Eigen::Index m = 0;  // measurement dimension

  std::function<RealVector(const RealVector&)> f;
  std::function<RealMatrix(const RealVector&)> F;
  std::function<RealVector(const RealVector&)> h;
  std::function<RealMatrix(const RealVector&)> H;
  std::function<RealMatrix(const RealVector&)> Q;
  std::function<RealMatrix(const RealVector&)> R;
  std::function<RealMatrix(const RealVector&)> S;
};

/// Estimate and covariance-like matrix at one time instant. P is kept
/// symmetric and positive definite by projection inside filter_step.
struct FilterState {
  Real t = 0.0;
  RealVector x;
  RealMatrix P;
};

/// Riccati shaping parameters for the state-dependent-noise variant.
struct RobustParams {
  Real mu = 0.0;
  Real lambda = 0.0;
};

struct FilterOptions {
  Real p_floor = 1e-9;
  std::optional<RobustParams> robust;
};

struct StepDiagnostics {
  RealMatrix gain;
  bool floored = false;
};

/// K = (P H^T + S) R^{-1}, computed as a linear solve. Throws
/// SingularMatrixError when cond(R) exceeds 1e12.
RealMatrix kalman_gain(const RealMatrix& P, const RealMatrix& H,
                       const RealMatrix& S, const RealMatrix& R);

/// dP/dt = F P + P F^T + Q - (P H^T + S) R^{-1} (P H^T + S)^T, symmetrized.
RealMatrix riccati_rhs(const RealMatrix& P, const RealMatrix& F,
                       const RealMatrix& H, const RealMatrix& Q,
                       const RealMatrix& R, const RealMatrix& S);

/// Shaped variant for state-dependent noise:
/// dP/dt = F P + P F^T + Qhat + lambda P^2 - K R K^T with
/// Qhat = mu I + S R^{-1} S^T and K = (P H^T + S) R^{-1}.
RealMatrix robust_riccati_rhs(const RealMatrix& P, const RealMatrix& F,
                              const RealMatrix& H, const RealMatrix& R,
                              const RealMatrix& S, const RobustParams& params);

/// One Euler step of estimate and covariance driven by the measurement
/// increment dy. The gain is evaluated at the pre-step (x, P); afterwards P
/// is symmetrized and eigenvalue-floored at options.p_floor.
FilterState filter_step(const FilterState& state, const FilterModel& model,
                        const RealVector& dy, Real dt,
                        const FilterOptions& options = {},
                        StepDiagnostics* diag = nullptr);

struct NoiseInequalityResult {
  Real min_eig = 0.0;
  bool pass = false;
};

/// Min eigenvalue of sym(m Q - S R^{-1} S^T); passes at >= -1e-10.
NoiseInequalityResult check_noise_inequality(const RealMatrix& Q,
                                             const RealMatrix& R,
                                             const RealMatrix& S, int m);

/// x_err^T P^{-1} x_err via a linear solve.
Real lyapunov_value(const RealVector& x_err, const RealMatrix& P);

}  // namespace qfilt::ekf
