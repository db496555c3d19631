#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfilt/rng.hpp"
#include "qfilt/slh.hpp"
#include "qfilt/states.hpp"
#include "qfilt/types.hpp"

namespace qfilt::sme {

enum class DetectorKind { Homodyne, Counting };

/// Detector attached to one SLH output channel (unit efficiency).
struct MeasurementChannel {
  DetectorKind kind = DetectorKind::Homodyne;
  int channel_index = 0;
};

struct Observable {
  std::string name;
  ComplexMatrix op;
};

struct SimConfig {
  Real dt = 1e-4;
  Real T = 1.0;
  std::uint64_t seed = 0;
  std::uint32_t trial = 0;  // selects the per-trial noise stream
  std::vector<Observable> record_expectations;
};

/// Time grid, per-step measurement increments and recorded conditional
/// expectations of one trajectory. `times` has steps+1 entries including 0;
/// `dy`/`dN` have one row per step; `expectations` has steps+1 rows (row 0 is
/// the initial state).
struct TrajectoryRecord {
  RealVector times;
  RealMatrix dy;        // steps x (number of homodyne channels)
  Eigen::MatrixXi dN;   // steps x (number of counting channels)
  RealMatrix expectations;
  std::vector<std::string> expectation_names;
  std::vector<int> homodyne_channels;  // SLH channel index per dy column
  std::vector<int> counting_channels;  // SLH channel index per dN column
  DensityOperator final_state;

  Eigen::Index steps() const { return dy.rows(); }
};

struct SmeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-step numerical diagnostics of the integrator.
struct StepInfo {
  Real trace_drift = 0.0;    // |tr - expected tr| before renormalization
  Real min_eig = 0.0;        // pre-clip minimum eigenvalue (relative); when
                             // the cheap positivity certificate succeeds this
                             // is the certified bound -1e-9
  Real clipped_mass = 0.0;   // total negative weight removed
};

/// Euler integrator for the conditional master equation of an SLH component
/// under homodyne (diffusive) and photon-counting (jump) detection. Each step
/// applies the deterministic generator, the measurement back-action, then
/// re-Hermitizes, clips negative eigenvalues and renormalizes the state.
class SmeIntegrator {
 public:
  SmeIntegrator(const slh::SLHTriple& model,
                std::vector<MeasurementChannel> channels);

  int n_homodyne() const { return static_cast<int>(homodyne_.size()); }
  int n_counting() const { return static_cast<int>(counting_.size()); }
  const std::vector<int>& homodyne_channels() const { return homodyne_; }
  const std::vector<int>& counting_channels() const { return counting_; }

  /// Advances rho by one step. dW holds one Gaussian increment (variance dt)
  /// per homodyne channel; u one uniform draw per counting channel. Outputs
  /// the homodyne increments dy and the counting marks dN.
  void step(ComplexMatrix& rho, const RealVector& dW, const RealVector& u,
            Real dt, RealVector& dy, Eigen::VectorXi& dN);

  const StepInfo& last_step() const { return info_; }

 private:
  std::vector<ComplexMatrix> couplings_;       // all SLH channels
  std::vector<ComplexMatrix> couplings_dag_;
  std::vector<ComplexMatrix> coupling_grams_;  // L^dag L
  ComplexMatrix kdrift_;       // -iH - sum L^dag L / 2
  std::vector<int> homodyne_;  // SLH channel indices
  std::vector<int> counting_;
  std::vector<int> unmonitored_;
  ComplexMatrix tmp_, gemm_, next_;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es_;
  Eigen::LLT<ComplexMatrix> llt_;
  StepInfo info_;
};

/// One diffusive step for a fully homodyne-monitored component:
/// rho' = rho + L*(rho) dt + sum_k Hk(rho) dW_k with
/// Hk(rho) = Lk rho + rho Lk^dag - tr((Lk + Lk^dag) rho) rho, followed by
/// re-Hermitization, positivity clip and renormalization.
/// dy_k = tr((Lk + Lk^dag) rho) dt + dW_k.
std::pair<ComplexMatrix, RealVector> step_diffusive(
    const ComplexMatrix& rho, const slh::SLHTriple& model,
    const std::vector<MeasurementChannel>& channels, const RealVector& dW,
    Real dt);

/// One jump-unraveling step for a single counting channel: with jump
/// probability p = tr(Lk rho Lk^dag) dt the state is replaced by the
/// normalized jump map, otherwise it follows the no-jump evolution. The
/// deterministic generator acts in either branch. Throws when p > 0.1.
std::pair<ComplexMatrix, int> step_jump(const ComplexMatrix& rho,
                                        const slh::SLHTriple& model,
                                        const MeasurementChannel& channel,
                                        Real u, Real dt);

/// Fixed-step trajectory combining all detector kinds; reproducible from
/// (model, config, seed, trial).
TrajectoryRecord simulate(const slh::SLHTriple& model,
                          const std::vector<MeasurementChannel>& channels,
                          const SimConfig& config, const DensityOperator& rho0);

/// Recorded tr(rho_t x_i) series for a subset of the recorded observables.
RealMatrix conditional_mean(const TrajectoryRecord& record,
                            const std::vector<std::string>& names);

/// Number of steps implied by (T, dt); T/dt must be integral within 1e-9.
Eigen::Index step_count(Real T, Real dt);

}  // namespace qfilt::sme
