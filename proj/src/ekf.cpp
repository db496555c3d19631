#include "qfilt/ekf.hpp"

namespace qfilt::ekf {

namespace {

constexpr Real kConditionLimit = 1e12;

// Solves X R = B for X (i.e. X = B R^{-1}) with R symmetric positive
// definite, guarding the condition number.
RealMatrix solve_right_spd(const RealMatrix& B, const RealMatrix& R) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(R);
  const RealVector& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0 || ev.maxCoeff() > kConditionLimit * ev.minCoeff()) {
    throw SingularMatrixError("measurement noise matrix is numerically singular");
  }
  const RealMatrix& V = es.eigenvectors();
  return B * V * ev.cwiseInverse().asDiagonal() * V.transpose();
}

}  // namespace

RealMatrix kalman_gain(const RealMatrix& P, const RealMatrix& H,
                       const RealMatrix& S, const RealMatrix& R) {
  return solve_right_spd(P * H.transpose() + S, R);
}

RealMatrix riccati_rhs(const RealMatrix& P, const RealMatrix& F,
                       const RealMatrix& H, const RealMatrix& Q,
                       const RealMatrix& R, const RealMatrix& S) {
  const RealMatrix PHS = P * H.transpose() + S;
  const RealMatrix K = solve_right_spd(PHS, R);
  return symmetrize(F * P + P * F.transpose() + Q - K * PHS.transpose());
}

RealMatrix robust_riccati_rhs(const RealMatrix& P, const RealMatrix& F,
                              const RealMatrix& H, const RealMatrix& R,
                              const RealMatrix& S, const RobustParams& params) {
  if (params.mu <= 0.0 || params.lambda < 0.0) {
    throw std::invalid_argument("robust_riccati_rhs: mu must be > 0, lambda >= 0");
  }
  const Eigen::Index n = P.rows();
  const RealMatrix SRinv = solve_right_spd(S, R);
  const RealMatrix Qhat =
      params.mu * RealMatrix::Identity(n, n) + SRinv * S.transpose();
  const RealMatrix K = kalman_gain(P, H, S, R);
  return symmetrize(F * P + P * F.transpose() + Qhat + params.lambda * P * P -
                    K * R * K.transpose());
}

FilterState filter_step(const FilterState& state, const FilterModel& model,
                        const RealVector& dy, Real dt,
                        const FilterOptions& options, StepDiagnostics* diag) {
  if (dy.size() != model.m || state.x.size() != model.n) {
    throw DimensionError("filter_step: dimension mismatch");
  }
  const RealVector& x = state.x;
  const RealMatrix F = model.F(x);
  const RealMatrix H = model.H(x);
  const RealMatrix R = model.R(x);
  const RealMatrix S = model.S(x);

  const RealMatrix K = kalman_gain(state.P, H, S, R);
  RealVector x_next = x + model.f(x) * dt + K * (dy - model.h(x) * dt);

  RealMatrix rhs;
  if (options.robust) {
    rhs = robust_riccati_rhs(state.P, F, H, R, S, *options.robust);
  } else {
    rhs = riccati_rhs(state.P, F, H, model.Q(x), R, S);
  }
  RealMatrix P_next = symmetrize(state.P + rhs * dt);

  // Positive-definiteness floor on P.
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(P_next);
  bool floored = false;
  if (es.eigenvalues().minCoeff() < options.p_floor) {
    floored = true;
    RealVector clipped = es.eigenvalues().cwiseMax(options.p_floor);
    P_next = es.eigenvectors() * clipped.asDiagonal() *
             es.eigenvectors().transpose();
    P_next = symmetrize(P_next);
  }

  if (!x_next.allFinite() || !P_next.allFinite()) {
    throw DivergenceError("filter_step: non-finite update");
  }
  if (diag != nullptr) {
    diag->gain = K;
    diag->floored = floored;
  }
  return FilterState{state.t + dt, std::move(x_next), std::move(P_next)};
}

NoiseInequalityResult check_noise_inequality(const RealMatrix& Q,
                                             const RealMatrix& R,
                                             const RealMatrix& S, int m) {
  const RealMatrix SRinv = solve_right_spd(S, R);
  const RealMatrix lhs =
      symmetrize(static_cast<Real>(m) * Q - SRinv * S.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(lhs, Eigen::EigenvaluesOnly);
  const Real min_eig = es.eigenvalues().minCoeff();
  return NoiseInequalityResult{min_eig, min_eig >= -1e-10};
}

Real lyapunov_value(const RealVector& x_err, const RealMatrix& P) {
  Eigen::LLT<RealMatrix> llt(P);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("lyapunov_value: P is not positive definite");
  }
  return x_err.dot(llt.solve(x_err));
}

}  // namespace qfilt::ekf
