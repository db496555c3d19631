#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qfilt/ekf.hpp"

using namespace qfilt;
using namespace qfilt::ekf;

namespace {

RealMatrix scalar(Real v) {
  RealMatrix m(1, 1);
  m << v;
  return m;
}

FilterModel affine_model(const RealMatrix& A, const RealMatrix& H,
                         const RealMatrix& Q, const RealMatrix& R,
                         const RealMatrix& S) {
  FilterModel model;
  model.n = A.rows();
  model.m = H.rows();
  model.f = [A](const RealVector& x) { return RealVector(A * x); };
  model.F = [A](const RealVector&) { return A; };
  model.h = [H](const RealVector& x) { return RealVector(H * x); };
  model.H = [H](const RealVector&) { return H; };
  model.Q = [Q](const RealVector&) { return Q; };
  model.R = [R](const RealVector&) { return R; };
  model.S = [S](const RealVector&) { return S; };
  return model;
}

}  // namespace

TEST_CASE("kalman gain closed forms") {
  const RealMatrix I2 = RealMatrix::Identity(2, 2);
  CHECK((kalman_gain(I2, I2, RealMatrix::Zero(2, 2), 2.0 * I2) - 0.5 * I2)
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK(kalman_gain(RealMatrix::Zero(2, 2), I2, RealMatrix::Zero(2, 2), I2)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(kalman_gain(scalar(0.3), scalar(2.0), scalar(0.1), scalar(0.5))(0, 0) ==
        doctest::Approx(1.4).epsilon(1e-12));
  CHECK_THROWS_AS(kalman_gain(I2, I2, RealMatrix::Zero(2, 2),
                              RealMatrix::Zero(2, 2)),
                  SingularMatrixError);
}

TEST_CASE("riccati right-hand side") {
  // Scalar steady state: P^2 + 2P - 1 = 0 at F=-1, H=1, Q=1, R=1, S=0.
  const Real p_star = std::sqrt(2.0) - 1.0;
  const RealMatrix rhs = riccati_rhs(scalar(p_star), scalar(-1.0), scalar(1.0),
                                     scalar(1.0), scalar(1.0), scalar(0.0));
  CHECK(std::abs(rhs(0, 0)) < 1e-12);

  // Skew-symmetric F with H = 0 leaves the trace slope at tr(Q) = n.
  RealMatrix F(2, 2);
  F << 0.0, 1.5, -1.5, 0.0;
  RealMatrix P(2, 2);
  P << 0.7, 0.2, 0.2, 1.1;
  const RealMatrix I2 = RealMatrix::Identity(2, 2);
  const RealMatrix r2 =
      riccati_rhs(P, F, RealMatrix::Zero(2, 2), I2, I2, RealMatrix::Zero(2, 2));
  CHECK(r2.trace() == doctest::Approx(2.0).epsilon(1e-12));

  // All-zero inputs give zero; the solve guard still needs R invertible.
  const RealMatrix z = RealMatrix::Zero(1, 1);
  CHECK(riccati_rhs(z, z, z, z, scalar(1.0), z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("riccati fixed points by integration") {
  // Standard: P* = sqrt(2) - 1.
  Real P = 1.0;
  const Real dt = 1e-4;
  for (int k = 0; k < 200000; ++k) {
    P += dt * riccati_rhs(scalar(P), scalar(-1.0), scalar(1.0), scalar(1.0),
                          scalar(1.0), scalar(0.0))(0, 0);
  }
  CHECK(std::abs(P - (std::sqrt(2.0) - 1.0)) < 1e-6);

  // Robust: 1 + 0.5 P^2 - P^2 = 0 at mu=1, lambda=0.5 -> P* = sqrt(2).
  Real Pr = 1.0;
  for (int k = 0; k < 200000; ++k) {
    Pr += dt * robust_riccati_rhs(scalar(Pr), scalar(0.0), scalar(1.0),
                                  scalar(1.0), scalar(0.0),
                                  RobustParams{1.0, 0.5})(0, 0);
  }
  CHECK(std::abs(Pr - std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("robust rhs properties") {
  RealMatrix P(2, 2);
  P << 1.3, -0.2, -0.2, 0.8;
  RealMatrix F(2, 2);
  F << -1.0, 0.3, 0.0, -0.5;
  RealMatrix H(1, 2);
  H << 1.0, 0.4;
  const RealMatrix R = scalar(0.7);
  const RealMatrix S = RealMatrix::Zero(2, 1);
  const Real mu = 0.9;

  // With S = 0 and lambda -> 0 the shaped equation reduces to the standard
  // one at Q = mu I.
  const RealMatrix a = robust_riccati_rhs(P, F, H, R, S, RobustParams{mu, 0.0});
  const RealMatrix b =
      riccati_rhs(P, F, H, mu * RealMatrix::Identity(2, 2), R, S);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);

  // The lambda P^2 term is exactly the difference from the lambda = 0 case.
  const Real lambda = 0.25;
  const RealMatrix c = robust_riccati_rhs(P, F, H, R, S, RobustParams{mu, lambda});
  CHECK((c - a - lambda * P * P).cwiseAbs().maxCoeff() < 1e-12);

  // With P = 2 I, lambda = 0.25 the shaping term contributes the identity.
  const RealMatrix P2 = 2.0 * RealMatrix::Identity(2, 2);
  const RealMatrix d0 = robust_riccati_rhs(P2, F, H, R, S, RobustParams{mu, 0.0});
  const RealMatrix d1 = robust_riccati_rhs(P2, F, H, R, S, RobustParams{mu, 0.25});
  CHECK((d1 - d0 - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(robust_riccati_rhs(P, F, H, R, S, RobustParams{0.0, 0.1}));
}

TEST_CASE("filter step basics") {
  RealMatrix A(1, 1), H(1, 1);
  A << 0.0;
  H << 1.0;
  FilterModel model = affine_model(A, H, scalar(1.0), scalar(1.0), scalar(0.0));

  // Zero innovation leaves the estimate in place.
  FilterState s{0.0, RealVector::Constant(1, 0.7), scalar(1.0)};
  const Real dt = 1e-3;
  RealVector dy = model.h(s.x) * dt;
  const FilterState s1 = filter_step(s, model, dy, dt);
  CHECK(s1.x(0) == doctest::Approx(0.7).epsilon(1e-14));

  // Hand Euler arithmetic: F=-1, H=1, Q=1, R=1, S=0 from P=1:
  // P' = 1 + (-2 + 1 - 1) dt.
  RealMatrix Am(1, 1);
  Am << -1.0;
  FilterModel m2 = affine_model(Am, H, scalar(1.0), scalar(1.0), scalar(0.0));
  FilterState s2{0.0, RealVector::Zero(1), scalar(1.0)};
  const FilterState s3 = filter_step(s2, m2, RealVector::Zero(1), dt);
  CHECK(s3.P(0, 0) == doctest::Approx(1.0 - 2.0 * dt).epsilon(1e-12));
}

TEST_CASE("linear model matches an independent recursion") {
  // Plain discrete Kalman-Bucy recursion, written out by hand with scalar
  // and 2x2 arithmetic only.
  RealMatrix A(2, 2);
  A << -0.8, 0.3, -0.1, -1.2;
  RealMatrix H(1, 2);
  H << 1.4, -0.3;
  RealMatrix Q(2, 2);
  Q << 0.5, 0.1, 0.1, 0.4;
  const RealMatrix R = scalar(0.8);
  RealMatrix S(2, 1);
  S << 0.2, -0.1;

  FilterModel model = affine_model(A, H, Q, R, S);
  const Real dt = 1e-3;

  FilterState state{0.0, RealVector::Zero(2), RealMatrix::Identity(2, 2)};
  RealVector ox = RealVector::Zero(2);
  RealMatrix oP = RealMatrix::Identity(2, 2);

  std::mt19937 gen(17);
  std::normal_distribution<Real> noise;
  StepDiagnostics diag;
  for (int k = 0; k < 2000; ++k) {
    RealVector dy(1);
    dy << 0.3 * dt + std::sqrt(dt) * noise(gen);

    state = filter_step(state, model, dy, dt, FilterOptions{}, &diag);

    // oracle update (oK uses the pre-step covariance, like the filter)
    const RealMatrix oK = (oP * H.transpose() + S) * R.inverse();
    const RealVector ox_next = ox + A * ox * dt + oK * (dy - H * ox * dt);
    const RealMatrix rhs = A * oP + oP * A.transpose() + Q -
                           oK * (oP * H.transpose() + S).transpose();
    oP += 0.5 * (rhs + rhs.transpose()) * dt;
    ox = ox_next;

    CHECK((state.x - ox).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((state.P - oP).cwiseAbs().maxCoeff() < 1e-10);
    // gain consistency against the standalone computation
    CHECK((diag.gain - oK).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("gain consistency at the pre-step state") {
  RealMatrix A(2, 2);
  A << -1.0, 0.0, 0.2, -0.4;
  RealMatrix H(2, 2);
  H << 1.0, 0.0, 0.3, 0.9;
  FilterModel model = affine_model(A, H, RealMatrix::Identity(2, 2),
                                   RealMatrix::Identity(2, 2),
                                   RealMatrix::Zero(2, 2));
  FilterState s{0.0, RealVector::Constant(2, 0.4),
                2.0 * RealMatrix::Identity(2, 2)};
  StepDiagnostics diag;
  filter_step(s, model, RealVector::Zero(2), 1e-3, FilterOptions{}, &diag);
  const RealMatrix expected = kalman_gain(s.P, H, RealMatrix::Zero(2, 2),
                                          RealMatrix::Identity(2, 2));
  CHECK((diag.gain - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("covariance stays positive definite under the floor") {
  RealMatrix A(2, 2);
  A << -2.0, 0.0, 0.0, -3.0;
  FilterModel model = affine_model(A, RealMatrix::Zero(1, 2),
                                   0.01 * RealMatrix::Identity(2, 2),
                                   scalar(1.0), RealMatrix::Zero(2, 1));
  FilterState s{0.0, RealVector::Zero(2), RealMatrix::Identity(2, 2)};
  for (int k = 0; k < 5000; ++k) {
    s = filter_step(s, model, RealVector::Zero(1), 1e-3);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(s.P, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= 1e-9 * (1.0 - 1e-12));
    CHECK((s.P - s.P.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("noise inequality diagnostic") {
  const RealMatrix Q = RealMatrix::Identity(2, 2);
  const RealMatrix R = RealMatrix::Identity(1, 1);
  CHECK(check_noise_inequality(Q, R, RealMatrix::Zero(2, 1), 1).pass);

  const auto bad = check_noise_inequality(scalar(1.0), scalar(1.0), scalar(2.0), 1);
  CHECK(bad.min_eig == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK_FALSE(bad.pass);
}

TEST_CASE("lyapunov value") {
  CHECK(lyapunov_value(RealVector::Zero(3), RealMatrix::Identity(3, 3)) == 0.0);
  RealVector x(2);
  x << 3.0, -4.0;
  CHECK(lyapunov_value(x, RealMatrix::Identity(2, 2)) ==
        doctest::Approx(25.0).epsilon(1e-14));
  CHECK(lyapunov_value(RealVector::Ones(2), 2.0 * RealMatrix::Identity(2, 2)) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("riccati monotonicity smoke test") {
  // H = 0, S = 0, Q > 0, stable F: P stays positive definite.
  RealMatrix F(3, 3);
  F << -1.0, 0.2, 0.0, 0.0, -0.7, 0.1, 0.0, 0.0, -0.4;
  RealMatrix P = 0.3 * RealMatrix::Identity(3, 3);
  const RealMatrix Q = 0.2 * RealMatrix::Identity(3, 3);
  const RealMatrix H = RealMatrix::Zero(1, 3);
  const RealMatrix S = RealMatrix::Zero(3, 1);
  const RealMatrix R = scalar(1.0);
  for (int k = 0; k < 20000; ++k) {
    P += 1e-3 * riccati_rhs(P, F, H, Q, R, S);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(P, Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues().minCoeff() > 0.0);
  }
}
