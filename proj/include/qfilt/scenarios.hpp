#pragma once

#include <vector>

#include "qfilt/ekf.hpp"
#include "qfilt/noise_model.hpp"
#include "qfilt/slh.hpp"
#include "qfilt/sme.hpp"
#include "qfilt/states.hpp"
#include "qfilt/types.hpp"

namespace qfilt::scenarios {

/// Multi-mode cavity with Kerr nonlinearity under homodyne detection of every
/// mode. chi = 0 with a single mode degenerates to the linear damped cavity.
struct KerrParams {
  int n_modes = 2;
  Real gamma = 32.0;
  Real chi = 0.3 * 3.14159265358979323846;
  RealMatrix coupling;          // direct-coupling strengths gamma_ij (i < j)
  std::vector<Complex> alpha0;  // initial coherent amplitude per mode
  Real zeta = 0.0;              // initial-estimate offset magnitude
  int basis = 16;               // per-mode truncation
  StateOptions state_options;
};

/// Cavity with a quadratic pump Hamiltonian i(eta^* a^2 - eta a^dag^2) whose
/// output passes a beam splitter; port 1 is homodyne-detected, port 2
/// photon-counted. Measurement covariances are state-dependent here.
struct CountingParams {
  Real gamma = 8.0;
  Complex eta = {0.8, 0.0};
  Real r = 0.70710678118654752440;  // beam-splitter amplitude, r^2 = 0.5
  int basis = 40;
  int initial_n = 20;
  Complex initial_alpha = {3.1622776601683795, 0.0};  // overwritten by defaults
  Real intensity_floor = 1e-6;
  StateOptions state_options;
};

/// Fills initial_n = basis/2 and initial_alpha = sqrt(basis/2) e^{i pi/4}.
CountingParams default_counting_params(int basis = 40);

/// Matched pair of an operator-level model (for the conditional master
/// equation) and its classical filter representation, plus the initial state
/// and the quadrature observables.
struct Scenario {
  slh::SLHTriple model;
  std::vector<sme::MeasurementChannel> channels;
  ekf::FilterModel filter;
  ComplexVector initial_state;
  RealVector x0;  // exact initial quadrature expectations
  std::vector<sme::Observable> observables;
};

/// Drift of the quadrature estimates: per-mode damping and direct coupling
/// plus the cubic Kerr terms
///   f_q = chi (p^3 + q^2 p - 2 p), f_p = -chi (q^3 + p^2 q - 2 q).
RealVector kerr_drift(const RealVector& x, const KerrParams& params);

/// Exact Jacobian of kerr_drift.
RealMatrix kerr_jacobian(const RealVector& x, const KerrParams& params);

/// Linear part of the Kerr drift (damping plus direct coupling).
RealMatrix kerr_linear_part(const KerrParams& params);

Scenario build_kerr(const KerrParams& params);
Scenario build_counting(const CountingParams& params);

/// Alternating sign pattern [1, -1, -1, 1, ...] used to offset the initial
/// estimate by zeta in the convergence experiments.
RealVector initial_offset_pattern(int n);

/// Freezes a filter model to its first-order expansion about x_lin: the
/// linearized-Kalman baseline that ignores the drift nonlinearity.
ekf::FilterModel linearize_at(const ekf::FilterModel& model,
                              const RealVector& x_lin);

}  // namespace qfilt::scenarios
