#include "qfilt/sme.hpp"

#include <algorithm>
#include <cmath>

namespace qfilt::sme {

namespace {

Real real_trace_product(const ComplexMatrix& a, const ComplexMatrix& rho) {
  // tr(a rho) for Hermitian observables of Hermitian states.
  return (a.transpose().cwiseProduct(rho)).sum().real();
}

}  // namespace

Eigen::Index step_count(Real T, Real dt) {
  if (dt <= 0.0 || T < 0.0) {
    throw std::invalid_argument("step_count: need dt > 0 and T >= 0");
  }
  const Real ratio = T / dt;
  const Real rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("step_count: T/dt is not an integer");
  }
  return static_cast<Eigen::Index>(rounded);
}

SmeIntegrator::SmeIntegrator(const slh::SLHTriple& model,
                             std::vector<MeasurementChannel> channels) {
  model.validate();
  const int m = model.n_channels();
  const int d = model.space.total_dim();

  std::vector<int> assigned(m, -1);
  for (const auto& ch : channels) {
    if (ch.channel_index < 0 || ch.channel_index >= m) {
      throw DimensionError("SmeIntegrator: channel index out of range");
    }
    if (assigned[ch.channel_index] != -1) {
      throw std::invalid_argument(
          "SmeIntegrator: channel already has a detector");
    }
    assigned[ch.channel_index] = (ch.kind == DetectorKind::Homodyne) ? 0 : 1;
    if (ch.kind == DetectorKind::Homodyne) {
      homodyne_.push_back(ch.channel_index);
    } else {
      counting_.push_back(ch.channel_index);
    }
  }
  for (int k = 0; k < m; ++k) {
    if (assigned[k] == -1) {
      unmonitored_.push_back(k);
    }
  }

  couplings_ = model.couplings;
  couplings_dag_.reserve(m);
  coupling_grams_.reserve(m);
  kdrift_ = -kI * model.hamiltonian;
  for (const auto& l : couplings_) {
    couplings_dag_.push_back(l.adjoint());
    coupling_grams_.push_back(couplings_dag_.back() * l);
    kdrift_ -= 0.5 * coupling_grams_.back();
  }
  tmp_.resize(d, d);
  gemm_.resize(d, d);
  next_.resize(d, d);
}

void SmeIntegrator::step(ComplexMatrix& rho, const RealVector& dW,
                         const RealVector& u, Real dt, RealVector& dy,
                         Eigen::VectorXi& dN) {
  if (dW.size() != n_homodyne() || u.size() != n_counting()) {
    throw DimensionError("SmeIntegrator::step: noise vector size mismatch");
  }
  dy.resize(n_homodyne());
  dN.resize(n_counting());

  // Deterministic part: K rho + rho K^dag plus recycling terms of every
  // channel that is not photon-counted. Counting channels contribute their
  // recycling through the jump branch instead.
  tmp_.noalias() = kdrift_ * rho;
  next_ = rho + dt * (tmp_ + tmp_.adjoint());
  for (int slot = 0; slot < n_homodyne(); ++slot) {
    const int k = homodyne_[slot];
    gemm_.noalias() = couplings_[k] * rho;
    // Innovation superoperator Lk rho + rho Lk^dag - <Lk + Lk^dag> rho.
    const Real c = 2.0 * gemm_.trace().real();
    next_ += dW(slot) * (gemm_ + gemm_.adjoint() - c * rho);
    tmp_.noalias() = gemm_ * couplings_dag_[k];
    next_ += dt * tmp_;
    dy(slot) = c * dt + dW(slot);
  }
  for (int k : unmonitored_) {
    gemm_.noalias() = couplings_[k] * rho;
    tmp_.noalias() = gemm_ * couplings_dag_[k];
    next_ += dt * tmp_;
  }

  Real expected_trace = 1.0;
  bool jumped = false;
  for (int slot = 0; slot < n_counting(); ++slot) {
    const int k = counting_[slot];
    const Real intensity = real_trace_product(coupling_grams_[k], rho);
    const Real p = intensity * dt;
    if (p > 0.1) {
      throw SmeError("step_jump: jump probability exceeds 0.1; reduce dt");
    }
    if (u(slot) < p) {
      gemm_.noalias() = couplings_[k] * next_;
      next_.noalias() = gemm_ * couplings_dag_[k];
      jumped = true;
      dN(slot) = 1;
    } else {
      expected_trace -= p;
      dN(slot) = 0;
    }
  }

  // Re-Hermitize, clip negative weight, renormalize.
  next_ = 0.5 * (next_ + next_.adjoint());
  Real trace = next_.trace().real();
  info_.trace_drift = jumped ? 0.0 : std::abs(trace - expected_trace);
  if (!jumped && info_.trace_drift > 1e-3) {
    throw SmeError("SME step: trace drift above 1e-3; reduce dt");
  }
  if (!(trace > 0.0) || !next_.allFinite()) {
    throw SmeError("SME step: state became non-finite; reduce dt");
  }

  // A Cholesky factorization of the slightly shifted state certifies
  // min eig >= -1e-9 * trace; the eigen-clip runs only when that fails.
  tmp_ = next_;
  tmp_.diagonal().array() += 1e-9 * trace;
  llt_.compute(tmp_);
  if (llt_.info() == Eigen::Success) {
    info_.min_eig = -1e-9;  // certified relative lower bound
    info_.clipped_mass = 0.0;
    rho = next_ / trace;
    return;
  }

  es_.compute(next_);
  const RealVector& ev = es_.eigenvalues();
  info_.min_eig = ev.minCoeff() / trace;
  info_.clipped_mass = 0.0;
  if (ev.minCoeff() < 0.0) {
    for (Eigen::Index i = 0; i < ev.size() && ev(i) < 0.0; ++i) {
      info_.clipped_mass -= ev(i);
      next_.noalias() -= ev(i) * (es_.eigenvectors().col(i) *
                                  es_.eigenvectors().col(i).adjoint());
    }
    trace = next_.trace().real();
    info_.clipped_mass /= trace;
  }
  rho = next_ / trace;
}

std::pair<ComplexMatrix, RealVector> step_diffusive(
    const ComplexMatrix& rho, const slh::SLHTriple& model,
    const std::vector<MeasurementChannel>& channels, const RealVector& dW,
    Real dt) {
  for (const auto& ch : channels) {
    if (ch.kind != DetectorKind::Homodyne) {
      throw std::invalid_argument("step_diffusive: all channels must be homodyne");
    }
  }
  SmeIntegrator integ(model, channels);
  ComplexMatrix out = rho;
  RealVector dy;
  Eigen::VectorXi dN;
  integ.step(out, dW, RealVector(0), dt, dy, dN);
  return {std::move(out), std::move(dy)};
}

std::pair<ComplexMatrix, int> step_jump(const ComplexMatrix& rho,
                                        const slh::SLHTriple& model,
                                        const MeasurementChannel& channel,
                                        Real u, Real dt) {
  if (channel.kind != DetectorKind::Counting) {
    throw std::invalid_argument("step_jump: channel must be counting");
  }
  SmeIntegrator integ(model, {channel});
  ComplexMatrix out = rho;
  RealVector dy;
  Eigen::VectorXi dN;
  RealVector uu(1);
  uu << u;
  integ.step(out, RealVector(0), uu, dt, dy, dN);
  return {std::move(out), dN(0)};
}

TrajectoryRecord simulate(const slh::SLHTriple& model,
                          const std::vector<MeasurementChannel>& channels,
                          const SimConfig& config, const DensityOperator& rho0) {
  const Eigen::Index steps = step_count(config.T, config.dt);
  SmeIntegrator integ(model, channels);
  const int nh = integ.n_homodyne();
  const int nc = integ.n_counting();
  const auto nobs = static_cast<Eigen::Index>(config.record_expectations.size());

  TrajectoryRecord rec;
  rec.homodyne_channels = integ.homodyne_channels();
  rec.counting_channels = integ.counting_channels();
  rec.times = RealVector::LinSpaced(steps + 1, 0.0, config.T);
  rec.times(0) = 0.0;
  rec.dy.resize(steps, nh);
  rec.dN.resize(steps, nc);
  rec.expectations.resize(steps + 1, nobs);
  rec.expectation_names.reserve(nobs);
  for (const auto& obs : config.record_expectations) {
    rec.expectation_names.push_back(obs.name);
  }

  NoiseStream stream(config.seed);
  ComplexMatrix rho = rho0.matrix;
  const Real sqrt_dt = std::sqrt(config.dt);

  auto record_row = [&](Eigen::Index row) {
    for (Eigen::Index i = 0; i < nobs; ++i) {
      rec.expectations(row, i) =
          real_trace_product(config.record_expectations[i].op, rho);
    }
  };
  record_row(0);

  RealVector dW(nh), dy(nh), u(nc);
  Eigen::VectorXi dN(nc);
  for (Eigen::Index k = 0; k < steps; ++k) {
    for (int s = 0; s < nh; ++s) {
      dW(s) = sqrt_dt * stream.gaussian(config.trial,
                                        static_cast<std::uint32_t>(k),
                                        rec.homodyne_channels[s]);
    }
    for (int s = 0; s < nc; ++s) {
      u(s) = stream.uniform(config.trial, static_cast<std::uint32_t>(k),
                            rec.counting_channels[s]);
    }
    integ.step(rho, dW, u, config.dt, dy, dN);
    rec.dy.row(k) = dy;
    rec.dN.row(k) = dN;
    record_row(k + 1);
  }
  rec.final_state = DensityOperator(std::move(rho));
  return rec;
}

RealMatrix conditional_mean(const TrajectoryRecord& record,
                            const std::vector<std::string>& names) {
  RealMatrix out(record.expectations.rows(),
                 static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto it = std::find(record.expectation_names.begin(),
                              record.expectation_names.end(), names[j]);
    if (it == record.expectation_names.end()) {
      throw std::invalid_argument("conditional_mean: observable '" + names[j] +
                                  "' was not recorded");
    }
    out.col(static_cast<Eigen::Index>(j)) = record.expectations.col(
        std::distance(record.expectation_names.begin(), it));
  }
  return out;
}

}  // namespace qfilt::sme
