#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfilt/ekf.hpp"
#include "qfilt/metrics.hpp"
#include "qfilt/scenarios.hpp"
#include "qfilt/sme.hpp"
#include "qfilt/types.hpp"

namespace qfilt::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Kerr, Counting, Linear };
enum class FilterKind { Qekf, RobustQekf, QkfLinearized };

struct FilterSpec {
  FilterKind kind = FilterKind::Qekf;
  ekf::RobustParams robust{0.5, 0.2};
  std::string name() const;
};

struct BenchConfig {
  std::vector<int> bases{8, 16, 32, 64};
  std::vector<int> modes{1};
  int ratio_basis = 20;   // two-mode ratio measurement point; 0 disables
  int repeats = 7;
};

struct SweepConfig {
  std::vector<Real> alphas{1.0, 2.0, 3.0};
  std::vector<int> bases{8, 32};
};

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Kerr;
  scenarios::KerrParams kerr;
  scenarios::CountingParams counting = scenarios::default_counting_params();
  Real dt = 1e-4;
  Real T = 1.0;
  std::vector<FilterSpec> filters{FilterSpec{}};
  int trials = 1;
  std::uint64_t master_seed = 1;
  int reference_basis = 0;  // 0: same basis as the scenario
  std::string output_dir = "out";
  Real p0 = 0.5;      // initial covariance P0 = p0 I
  Real p_floor = 1e-9;
  bool write_trajectories = true;
  int threads = 0;    // 0: hardware concurrency
  BenchConfig bench;
  SweepConfig sweep;
};

/// Builds the configured scenario at an explicit truncation (0 = configured).
scenarios::Scenario build_scenario(const RunConfig& config, int basis = 0);

struct FilterMetrics {
  std::string name;
  Real mise = 0.0;      // mean over non-divergent trials
  int divergences = 0;
  int trials = 0;
};

struct TimingRow {
  int basis = 0;
  int modes = 0;
  Real t_sme_step = 0.0;
  Real t_qekf_step = 0.0;
  Real ratio = 0.0;
};

/// Everything recorded for one trial: the emitted record, the reference
/// conditional means and each estimator's trajectory.
struct TrialData {
  sme::TrajectoryRecord record;
  RealMatrix reference;                 // (steps+1) x n conditional means
  std::vector<RealMatrix> estimates;    // per filter, (steps+1) x n
  std::vector<RealMatrix> covariances;  // per filter, steps x n^2 (row-major P)
  std::vector<RealMatrix> gains;        // per filter, steps x (n m)
  std::vector<int> floor_count;         // per filter
  std::vector<bool> diverged;           // per filter
  std::vector<Real> mise;               // per filter, then scenario-SME row
};

struct MetricReport {
  std::vector<FilterMetrics> filters;  // per filter plus trailing "sme" row
  std::vector<std::string> band_names; // "ref", "sme", then filter names
  std::vector<BandStats> band_stats;   // over estimate series, rows = steps
  RealVector band_times;
  std::vector<TimingRow> timing;
  std::vector<TrialData> trials;
  Eigen::Index steps = 0;
  Real dt = 0.0;
  Real T = 0.0;
};

/// Monte Carlo comparison: the scenario-basis trajectory emits the record
/// every estimator consumes; the reference-basis trajectory, driven by the
/// same noise stream, provides the error baseline.
MetricReport run_compare(const RunConfig& config);

/// Wall-clock cost of one SME step and one filter step per (basis, modes),
/// single-threaded, median over repeats.
std::vector<TimingRow> bench_step(const RunConfig& config);

/// Log-log slope of SME step cost against basis size at fixed mode count.
Real cost_scaling_slope(const std::vector<TimingRow>& rows, int modes);

/// Writes metrics.csv, bands.csv, timing.csv, per-trial trajectory CSVs and
/// the manifest into `dir`.
void emit_outputs(const MetricReport& report, const RunConfig& config,
                  const std::string& dir);

/// Per-cell compare over sweep.alphas x sweep.bases (Kerr family only);
/// returns rows (alpha, basis, filter metrics).
struct SweepRow {
  Real alpha = 0.0;
  int basis = 0;
  FilterMetrics metrics;
};
std::vector<SweepRow> run_sweep(const RunConfig& config);
void emit_sweep(const std::vector<SweepRow>& rows, const std::string& dir);

/// JSON round trip used by the CLI and the manifest. Accepts either a bare
/// config document or a manifest wrapper carrying one under "config".
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string config_to_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

/// Runs the configured filter over a measurement record. The measurement
/// matrix is assembled from the record in SLH channel order (homodyne dy
/// columns, counting dN marks).
struct FilterRun {
  RealMatrix estimates;    // (steps+1) x n
  RealMatrix covariances;  // steps x n^2
  RealMatrix gains;        // steps x (n m)
  int floor_count = 0;
  bool diverged = false;
  Eigen::Index diverged_at = -1;
};
FilterRun run_filter(const ekf::FilterModel& model,
                     const sme::TrajectoryRecord& record,
                     const RealVector& x0, const RealMatrix& P0, Real dt,
                     const ekf::FilterOptions& options);

/// Measurement increments in SLH channel order: homodyne columns carry dy,
/// counting columns carry dN.
RealMatrix measurement_matrix(const sme::TrajectoryRecord& record, int m);

}  // namespace qfilt::harness
