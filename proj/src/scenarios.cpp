#include "qfilt/scenarios.hpp"

#include <cmath>

namespace qfilt::scenarios {

namespace {

void check_kerr_params(const KerrParams& p) {
  if (p.n_modes < 1) {
    throw std::invalid_argument("KerrParams: n_modes must be >= 1");
  }
  if (p.gamma <= 0.0) {
    throw std::invalid_argument("KerrParams: gamma must be > 0");
  }
  if (p.basis < 4) {
    throw std::invalid_argument("KerrParams: basis must be >= 4");
  }
  if (p.coupling.size() != 0 &&
      (p.coupling.rows() != p.n_modes || p.coupling.cols() != p.n_modes)) {
    throw std::invalid_argument("KerrParams: coupling must be n_modes x n_modes");
  }
  if (p.coupling.size() != 0 && p.coupling.minCoeff() < 0.0) {
    throw std::invalid_argument("KerrParams: coupling strengths must be >= 0");
  }
  if (!p.alpha0.empty() &&
      static_cast<int>(p.alpha0.size()) != p.n_modes) {
    throw std::invalid_argument("KerrParams: one initial amplitude per mode");
  }
}

Real coupling_entry(const KerrParams& p, int i, int j) {
  return p.coupling.size() == 0 ? 0.0 : p.coupling(i, j);
}

// Exact first and second moments of the quadratures in a pure state.
void quadrature_moments(const ComplexVector& psi,
                        const std::vector<sme::Observable>& obs,
                        RealVector& mean) {
  const DensityOperator rho = DensityOperator::from_state(psi);
  mean.resize(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    mean(static_cast<Eigen::Index>(i)) = real_expectation(rho.matrix, obs[i].op);
  }
}

std::vector<sme::Observable> quadrature_observables(const FockSpace& space) {
  std::vector<sme::Observable> obs;
  for (int m = 0; m < space.n_modes(); ++m) {
    auto [q, p] = quadratures(space, m);
    const std::string suffix = std::to_string(m + 1);
    obs.push_back({"q" + suffix, std::move(q)});
    obs.push_back({"p" + suffix, std::move(p)});
  }
  return obs;
}

}  // namespace

RealMatrix kerr_linear_part(const KerrParams& params) {
  const int n = params.n_modes;
  RealMatrix a = RealMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    a.block(2 * i, 2 * i, 2, 2) = -0.5 * params.gamma * RealMatrix::Identity(2, 2);
    for (int j = i + 1; j < n; ++j) {
      const Real g = std::sqrt(coupling_entry(params, i, j));
      if (g > 0.0) {
        a.block(2 * i, 2 * j, 2, 2) = g * RealMatrix::Identity(2, 2);
        a.block(2 * j, 2 * i, 2, 2) = -g * RealMatrix::Identity(2, 2);
      }
    }
  }
  return a;
}

RealVector kerr_drift(const RealVector& x, const KerrParams& params) {
  check_kerr_params(params);
  if (x.size() != 2 * params.n_modes) {
    throw DimensionError("kerr_drift: state dimension mismatch");
  }
  RealVector f = kerr_linear_part(params) * x;
  for (int i = 0; i < params.n_modes; ++i) {
    const Real q = x(2 * i);
    const Real p = x(2 * i + 1);
    f(2 * i) += params.chi * (p * p * p + q * q * p - 2.0 * p);
    f(2 * i + 1) -= params.chi * (q * q * q + p * p * q - 2.0 * q);
  }
  return f;
}

RealMatrix kerr_jacobian(const RealVector& x, const KerrParams& params) {
  check_kerr_params(params);
  if (x.size() != 2 * params.n_modes) {
    throw DimensionError("kerr_jacobian: state dimension mismatch");
  }
  RealMatrix F = kerr_linear_part(params);
  for (int i = 0; i < params.n_modes; ++i) {
    const Real q = x(2 * i);
    const Real p = x(2 * i + 1);
    F(2 * i, 2 * i) += params.chi * 2.0 * q * p;
    F(2 * i, 2 * i + 1) += params.chi * (3.0 * p * p + q * q - 2.0);
    F(2 * i + 1, 2 * i) -= params.chi * (3.0 * q * q + p * p - 2.0);
    F(2 * i + 1, 2 * i + 1) -= params.chi * 2.0 * q * p;
  }
  return F;
}

Scenario build_kerr(const KerrParams& params) {
  check_kerr_params(params);
  const int n = params.n_modes;
  const FockSpace space(std::vector<int>(n, params.basis));
  const int d = space.total_dim();

  // Hamiltonian: Kerr terms chi a^dag^2 a^2 = chi n (n - 1) per mode plus the
  // direct-coupling exchange i sqrt(gamma_ij) (a_j a_i^dag - a_i a_j^dag).
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  std::vector<ComplexMatrix> modes_a(n);
  for (int i = 0; i < n; ++i) {
    modes_a[i] = annihilation(space, i);
    const ComplexMatrix num = number_operator(space, i);
    h += params.chi * (num * num - num);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Real g = std::sqrt(coupling_entry(params, i, j));
      if (g > 0.0) {
        const ComplexMatrix x = modes_a[j] * modes_a[i].adjoint() -
                                modes_a[i] * modes_a[j].adjoint();
        h += kI * g * x;
      }
    }
  }

  std::vector<ComplexMatrix> couplings(n);
  for (int i = 0; i < n; ++i) {
    couplings[i] = std::sqrt(params.gamma) * modes_a[i];
  }
  slh::SLHTriple model{ComplexMatrix::Identity(n, n), std::move(couplings),
                       hermitize(h), space};

  std::vector<sme::MeasurementChannel> channels;
  std::vector<sme::DetectorKind> kinds(n, sme::DetectorKind::Homodyne);
  for (int i = 0; i < n; ++i) {
    channels.push_back({sme::DetectorKind::Homodyne, i});
  }

  // Coupling coefficients: L_i = sqrt(gamma/2) (q_i + i p_i).
  ComplexMatrix c0 = ComplexMatrix::Zero(2 * n, n);
  const Real s = std::sqrt(params.gamma / 2.0);
  for (int i = 0; i < n; ++i) {
    c0(2 * i, i) = s;
    c0(2 * i + 1, i) = Complex{0.0, s};
  }
  NoiseModel noise =
      build_noise_model(c0, ComplexMatrix::Identity(n, n), kinds);

  ekf::FilterModel filter;
  filter.n = 2 * n;
  filter.m = n;
  filter.f = [params](const RealVector& x) { return kerr_drift(x, params); };
  filter.F = [params](const RealVector& x) { return kerr_jacobian(x, params); };
  filter.h = noise.h;
  filter.H = noise.H;
  filter.Q = [Q = noise.Q](const RealVector&) { return Q; };
  filter.R = noise.R;
  filter.S = noise.S;

  Scenario out{std::move(model), std::move(channels), std::move(filter),
               ComplexVector(), RealVector(), quadrature_observables(space)};

  std::vector<ComplexVector> mode_states;
  for (int i = 0; i < n; ++i) {
    const Complex alpha = params.alpha0.empty() ? Complex{0.0, 0.0}
                                                : params.alpha0[i];
    mode_states.push_back(
        coherent_state(params.basis, alpha, params.state_options));
  }
  out.initial_state = product_state(mode_states);
  quadrature_moments(out.initial_state, out.observables, out.x0);
  return out;
}

CountingParams default_counting_params(int basis) {
  CountingParams p;
  p.basis = basis;
  p.initial_n = basis / 2;
  const Real amp = std::sqrt(static_cast<Real>(basis) / 2.0);
  p.initial_alpha = amp * std::exp(kI * (3.14159265358979323846 / 4.0));
  return p;
}

Scenario build_counting(const CountingParams& params) {
  if (params.r < 0.0 || params.r > 1.0) {
    throw std::invalid_argument("CountingParams: r must lie in [0, 1]");
  }
  if (params.basis < 8) {
    throw std::invalid_argument("CountingParams: basis must be >= 8");
  }
  const FockSpace space(params.basis);
  const ComplexMatrix a = annihilation(space, 0);

  // Quadratic pump i (eta^* a^2 - eta a^dag^2).
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix h =
      kI * (std::conj(params.eta) * a2 - params.eta * a2.adjoint());

  // Network: the cavity concatenated with a vacuum channel, fed through a
  // beam splitter.
  slh::SLHTriple cavity{ComplexMatrix::Identity(1, 1),
                        {std::sqrt(params.gamma) * a},
                        hermitize(h),
                        space};
  slh::SLHTriple vacuum_port = slh::trivial_system(space, 1);
  slh::SLHTriple splitter{slh::beam_splitter(params.r),
                          {ComplexMatrix::Zero(space.total_dim(), space.total_dim()),
                           ComplexMatrix::Zero(space.total_dim(), space.total_dim())},
                          ComplexMatrix::Zero(space.total_dim(), space.total_dim()),
                          space};
  slh::SLHTriple model = slh::series(splitter, slh::concatenate(cavity, vacuum_port));

  std::vector<sme::MeasurementChannel> channels{
      {sme::DetectorKind::Homodyne, 0}, {sme::DetectorKind::Counting, 1}};
  std::vector<sme::DetectorKind> kinds{sme::DetectorKind::Homodyne,
                                       sme::DetectorKind::Counting};

  ComplexMatrix c0 = ComplexMatrix::Zero(2, 2);
  const Real s = std::sqrt(params.gamma / 2.0);
  c0(0, 0) = s;
  c0(1, 0) = Complex{0.0, s};
  NoiseModel noise = build_noise_model(c0, slh::beam_splitter(params.r), kinds,
                                       params.intensity_floor);

  // Drift: damping plus the linear squeezing contribution
  // [-2 Re(eta), -2 Im(eta); -2 Im(eta), 2 Re(eta)].
  RealMatrix A = -0.5 * params.gamma * RealMatrix::Identity(2, 2);
  A(0, 0) -= 2.0 * params.eta.real();
  A(0, 1) -= 2.0 * params.eta.imag();
  A(1, 0) -= 2.0 * params.eta.imag();
  A(1, 1) += 2.0 * params.eta.real();

  ekf::FilterModel filter;
  filter.n = 2;
  filter.m = 2;
  filter.f = [A](const RealVector& x) { return RealVector(A * x); };
  filter.F = [A](const RealVector&) { return A; };
  filter.h = noise.h;
  filter.H = noise.H;
  filter.Q = [Q = noise.Q](const RealVector&) { return Q; };
  filter.R = noise.R;
  filter.S = noise.S;

  Scenario out{std::move(model), std::move(channels), std::move(filter),
               ComplexVector(), RealVector(), quadrature_observables(space)};
  out.initial_state = superpose(
      {0.5, 0.5},
      {fock_state(params.basis, params.initial_n),
       coherent_state(params.basis, params.initial_alpha, params.state_options)});
  quadrature_moments(out.initial_state, out.observables, out.x0);
  return out;
}

RealVector initial_offset_pattern(int n) {
  RealVector v(n);
  for (int i = 0; i < n; ++i) {
    const int mode = i / 2;
    const bool q_slot = (i % 2) == 0;
    const Real sign = (mode % 2 == 0) ? 1.0 : -1.0;
    v(i) = q_slot ? sign : -sign;
  }
  return v;
}

ekf::FilterModel linearize_at(const ekf::FilterModel& model,
                              const RealVector& x_lin) {
  ekf::FilterModel out = model;
  const RealVector f0 = model.f(x_lin);
  const RealMatrix F0 = model.F(x_lin);
  const RealVector h0 = model.h(x_lin);
  const RealMatrix H0 = model.H(x_lin);
  out.f = [f0, F0, x_lin](const RealVector& x) {
    return RealVector(f0 + F0 * (x - x_lin));
  };
  out.F = [F0](const RealVector&) { return F0; };
  out.h = [h0, H0, x_lin](const RealVector& x) {
    return RealVector(h0 + H0 * (x - x_lin));
  };
  out.H = [H0](const RealVector&) { return H0; };
  out.Q = [Q0 = model.Q(x_lin)](const RealVector&) { return Q0; };
  out.R = [R0 = model.R(x_lin)](const RealVector&) { return R0; };
  out.S = [S0 = model.S(x_lin)](const RealVector&) { return S0; };
  return out;
}

}  // namespace qfilt::scenarios
