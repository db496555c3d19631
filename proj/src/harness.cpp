#include "qfilt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qfilt/csv.hpp"

namespace qfilt::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string FilterSpec::name() const {
  switch (kind) {
    case FilterKind::Qekf:
      return "qekf";
    case FilterKind::RobustQekf:
      return "robust-qekf";
    case FilterKind::QkfLinearized:
      return "qkf-linearized";
  }
  return "unknown";
}

scenarios::Scenario build_scenario(const RunConfig& config, int basis) {
  switch (config.scenario) {
    case ScenarioKind::Kerr: {
      scenarios::KerrParams p = config.kerr;
      if (basis > 0) p.basis = basis;
      return scenarios::build_kerr(p);
    }
    case ScenarioKind::Linear: {
      scenarios::KerrParams p = config.kerr;
      p.chi = 0.0;
      p.n_modes = 1;
      if (!p.alpha0.empty()) p.alpha0.resize(1);
      p.coupling.resize(0, 0);
      if (basis > 0) p.basis = basis;
      return scenarios::build_kerr(p);
    }
    case ScenarioKind::Counting: {
      scenarios::CountingParams p = config.counting;
      if (basis > 0) p.basis = basis;
      return scenarios::build_counting(p);
    }
  }
  throw ConfigError("unknown scenario");
}

RealMatrix measurement_matrix(const sme::TrajectoryRecord& record, int m) {
  RealMatrix y = RealMatrix::Zero(record.steps(), m);
  for (std::size_t j = 0; j < record.homodyne_channels.size(); ++j) {
    y.col(record.homodyne_channels[j]) = record.dy.col(static_cast<Eigen::Index>(j));
  }
  for (std::size_t j = 0; j < record.counting_channels.size(); ++j) {
    y.col(record.counting_channels[j]) =
        record.dN.col(static_cast<Eigen::Index>(j)).cast<Real>();
  }
  return y;
}

FilterRun run_filter(const ekf::FilterModel& model,
                     const sme::TrajectoryRecord& record,
                     const RealVector& x0, const RealMatrix& P0, Real dt,
                     const ekf::FilterOptions& options) {
  const Eigen::Index steps = record.steps();
  const Eigen::Index n = model.n;
  const Eigen::Index m = model.m;
  const RealMatrix y = measurement_matrix(record, static_cast<int>(m));

  FilterRun out;
  out.estimates.setConstant(steps + 1, n, std::numeric_limits<Real>::quiet_NaN());
  out.covariances.setConstant(steps, n * n, std::numeric_limits<Real>::quiet_NaN());
  out.gains.setConstant(steps, n * m, std::numeric_limits<Real>::quiet_NaN());
  out.estimates.row(0) = x0;

  ekf::FilterState state{0.0, x0, P0};
  ekf::StepDiagnostics diag;
  for (Eigen::Index k = 0; k < steps; ++k) {
    try {
      state = ekf::filter_step(state, model, y.row(k).transpose(), dt, options,
                               &diag);
    } catch (const DivergenceError&) {
      out.diverged = true;
      out.diverged_at = k;
      break;
    } catch (const SingularMatrixError&) {
      out.diverged = true;
      out.diverged_at = k;
      break;
    }
    out.estimates.row(k + 1) = state.x;
    out.covariances.row(k) =
        Eigen::Map<const RealVector>(state.P.data(), n * n);
    out.gains.row(k) = Eigen::Map<const RealVector>(diag.gain.data(), n * m);
    if (diag.floored) ++out.floor_count;
  }
  return out;
}

namespace {

ekf::FilterModel model_for(const FilterSpec& spec,
                           const scenarios::Scenario& scenario) {
  if (spec.kind == FilterKind::QkfLinearized) {
    return scenarios::linearize_at(scenario.filter,
                                   RealVector::Zero(scenario.filter.n));
  }
  return scenario.filter;
}

Real nan_mean(const std::vector<Real>& v) {
  Real sum = 0.0;
  int count = 0;
  for (Real x : v) {
    if (std::isfinite(x)) {
      sum += x;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<Real>::quiet_NaN()
                    : sum / static_cast<Real>(count);
}

}  // namespace

MetricReport run_compare(const RunConfig& config) {
  if (config.trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  const scenarios::Scenario scenario = build_scenario(config);
  const int scenario_basis = config.scenario == ScenarioKind::Counting
                                 ? config.counting.basis
                                 : config.kerr.basis;
  const bool separate_reference =
      config.reference_basis != 0 && config.reference_basis != scenario_basis;
  if (config.reference_basis != 0 && config.reference_basis < scenario_basis) {
    throw ConfigError("reference_basis must be >= scenario basis");
  }
  std::optional<scenarios::Scenario> reference;
  if (separate_reference) {
    reference = build_scenario(config, config.reference_basis);
  }

  const Eigen::Index steps = sme::step_count(config.T, config.dt);
  const Eigen::Index n = scenario.filter.n;
  const DensityOperator rho0 = DensityOperator::from_state(scenario.initial_state);
  const DensityOperator ref_rho0 =
      separate_reference ? DensityOperator::from_state(reference->initial_state)
                         : DensityOperator();

  // Initial estimate: exact initial moments plus the configured offset.
  RealVector x0 = scenario.x0;
  if (config.scenario != ScenarioKind::Counting && config.kerr.zeta != 0.0) {
    x0 += config.kerr.zeta * scenarios::initial_offset_pattern(static_cast<int>(n));
  }
  const RealMatrix P0 = config.p0 * RealMatrix::Identity(n, n);

  std::vector<ekf::FilterModel> models;
  std::vector<ekf::FilterOptions> options;
  for (const auto& spec : config.filters) {
    models.push_back(model_for(spec, scenario));
    ekf::FilterOptions opt;
    opt.p_floor = config.p_floor;
    if (spec.kind == FilterKind::RobustQekf) {
      opt.robust = spec.robust;
    }
    options.push_back(opt);
  }

  MetricReport report;
  report.steps = steps;
  report.dt = config.dt;
  report.T = config.T;
  report.trials.resize(config.trials);

  auto run_trial = [&](int t) {
    sme::SimConfig sim;
    sim.dt = config.dt;
    sim.T = config.T;
    sim.seed = config.master_seed;
    sim.trial = static_cast<std::uint32_t>(t);
    sim.record_expectations = scenario.observables;

    TrialData data;
    data.record = sme::simulate(scenario.model, scenario.channels, sim, rho0);
    if (separate_reference) {
      sme::SimConfig ref_sim = sim;
      ref_sim.record_expectations = reference->observables;
      const sme::TrajectoryRecord ref_rec =
          sme::simulate(reference->model, reference->channels, ref_sim, ref_rho0);
      data.reference = ref_rec.expectations;
    } else {
      data.reference = data.record.expectations;
    }

    for (std::size_t fi = 0; fi < models.size(); ++fi) {
      FilterRun run = run_filter(models[fi], data.record, x0, P0, config.dt,
                                 options[fi]);
      Real value = 0.0;
      if (run.diverged) {
        value = std::numeric_limits<Real>::quiet_NaN();
      } else if (steps > 0) {
        value = mise(run.estimates.topRows(steps),
                     data.reference.topRows(steps), config.T);
      }
      data.mise.push_back(value);
      data.estimates.push_back(std::move(run.estimates));
      data.covariances.push_back(std::move(run.covariances));
      data.gains.push_back(std::move(run.gains));
      data.floor_count.push_back(run.floor_count);
      data.diverged.push_back(run.diverged);
    }
    // Truncated-simulator error against the reference.
    data.mise.push_back(steps == 0
                            ? 0.0
                            : mise(data.record.expectations.topRows(steps),
                                   data.reference.topRows(steps), config.T));
    report.trials[static_cast<std::size_t>(t)] = std::move(data);
  };

  int nthreads = config.threads > 0
                     ? config.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, config.trials));
  if (nthreads == 1) {
    for (int t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < config.trials;
             t = next.fetch_add(1)) {
          run_trial(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Aggregate MISE and divergences.
  for (std::size_t fi = 0; fi <= config.filters.size(); ++fi) {
    FilterMetrics fm;
    fm.name = fi < config.filters.size() ? config.filters[fi].name() : "sme";
    fm.trials = config.trials;
    std::vector<Real> values;
    for (const auto& trial : report.trials) {
      values.push_back(trial.mise[fi]);
      if (fi < config.filters.size() && trial.diverged[fi]) ++fm.divergences;
    }
    fm.mise = nan_mean(values);
    report.filters.push_back(std::move(fm));
  }

  // Mean and one-standard-deviation bands over the post-step estimates.
  report.band_times = RealVector::LinSpaced(steps, config.dt, config.T);
  report.band_names.push_back("ref");
  report.band_names.push_back("sme");
  for (const auto& spec : config.filters) {
    report.band_names.push_back(spec.name());
  }
  for (std::size_t s = 0; s < report.band_names.size(); ++s) {
    std::vector<RealMatrix> series;
    series.reserve(report.trials.size());
    for (const auto& trial : report.trials) {
      if (s == 0) {
        series.push_back(trial.reference.bottomRows(steps));
      } else if (s == 1) {
        series.push_back(trial.record.expectations.bottomRows(steps));
      } else {
        series.push_back(trial.estimates[s - 2].bottomRows(steps));
      }
    }
    report.band_stats.push_back(bands(series));
  }
  return report;
}

namespace {

using Clock = std::chrono::steady_clock;

Real median(std::vector<Real> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

Real time_sme_steps(sme::SmeIntegrator& integ, ComplexMatrix& rho, Real dt,
                    int count, std::uint64_t seed) {
  NoiseStream stream(seed);
  const int nh = integ.n_homodyne();
  RealVector dW(nh), dy(nh), u(0);
  Eigen::VectorXi dN(0);
  const Real sdt = std::sqrt(dt);
  const auto t0 = Clock::now();
  for (int k = 0; k < count; ++k) {
    for (int c = 0; c < nh; ++c) {
      dW(c) = sdt * stream.gaussian(0, static_cast<std::uint32_t>(k),
                                    static_cast<std::uint32_t>(c));
    }
    integ.step(rho, dW, u, dt, dy, dN);
  }
  const auto t1 = Clock::now();
  return std::chrono::duration<Real>(t1 - t0).count() / count;
}

Real time_filter_steps(const ekf::FilterModel& model, Real dt, int count) {
  ekf::FilterState state{0.0, RealVector::Zero(model.n),
                         RealMatrix::Identity(model.n, model.n) * 0.5};
  const RealVector dy = RealVector::Zero(model.m);
  const ekf::FilterOptions opt;
  const auto t0 = Clock::now();
  for (int k = 0; k < count; ++k) {
    state = ekf::filter_step(state, model, dy, dt, opt);
  }
  const auto t1 = Clock::now();
  return std::chrono::duration<Real>(t1 - t0).count() / count;
}

}  // namespace

std::vector<TimingRow> bench_step(const RunConfig& config) {
  if (config.bench.repeats < 5) {
    throw ConfigError("bench repeats must be >= 5");
  }
  std::vector<TimingRow> rows;
  for (int modes : config.bench.modes) {
    for (int basis : config.bench.bases) {
      scenarios::KerrParams p = config.kerr;
      p.n_modes = modes;
      p.basis = basis;
      p.alpha0.assign(static_cast<std::size_t>(modes), Complex{0.4, 0.2});
      p.zeta = 0.0;
      const scenarios::Scenario scenario = scenarios::build_kerr(p);
      sme::SmeIntegrator integ(scenario.model, scenario.channels);
      ComplexMatrix rho =
          DensityOperator::from_state(scenario.initial_state).matrix;
      const Real dt = config.dt;

      // Warm up and size the timed batch to about 25 ms.
      const Real est = time_sme_steps(integ, rho, dt, 3, config.master_seed);
      const int batch =
          std::max(1, std::min(4000, static_cast<int>(0.025 / est) + 1));
      std::vector<Real> sme_times, ekf_times;
      for (int r = 0; r < config.bench.repeats; ++r) {
        sme_times.push_back(
            time_sme_steps(integ, rho, dt, batch, config.master_seed + r + 1));
      }
      const Real ekf_est = time_filter_steps(scenario.filter, dt, 100) ;
      const int ekf_batch =
          std::max(100, std::min(200000, static_cast<int>(0.01 / ekf_est) + 1));
      for (int r = 0; r < config.bench.repeats; ++r) {
        ekf_times.push_back(time_filter_steps(scenario.filter, dt, ekf_batch));
      }
      TimingRow row;
      row.basis = basis;
      row.modes = modes;
      row.t_sme_step = median(sme_times);
      row.t_qekf_step = median(ekf_times);
      row.ratio = row.t_sme_step / row.t_qekf_step;
      rows.push_back(row);
    }
  }
  return rows;
}

Real cost_scaling_slope(const std::vector<TimingRow>& rows, int modes) {
  std::vector<Real> xs, ys;
  for (const auto& row : rows) {
    if (row.modes == modes) {
      xs.push_back(std::log(static_cast<Real>(row.basis)));
      ys.push_back(std::log(row.t_sme_step));
    }
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("cost_scaling_slope: need at least two bases");
  }
  const Real n = static_cast<Real>(xs.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

void write_metrics_csv(const std::string& path,
                       const std::vector<FilterMetrics>& metrics) {
  csv::Writer w(path);
  w.header({"filter_name", "mise", "divergences", "trials"});
  for (const auto& m : metrics) {
    w.begin_row();
    w.field(m.name);
    w.field(m.mise);
    w.field(static_cast<long long>(m.divergences));
    w.field(static_cast<long long>(m.trials));
    w.end_row();
  }
  w.close();
}

void write_timing_csv(const std::string& path,
                      const std::vector<TimingRow>& rows) {
  csv::Writer w(path);
  w.header({"N_s", "modes", "t_SME_step", "t_qEKF_step", "ratio"});
  for (const auto& r : rows) {
    w.begin_row();
    w.field(static_cast<long long>(r.basis));
    w.field(static_cast<long long>(r.modes));
    w.field(r.t_sme_step);
    w.field(r.t_qekf_step);
    w.field(r.ratio);
    w.end_row();
  }
  w.close();
}

std::string trial_suffix(std::size_t t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", t);
  return buf;
}

void write_record_csv(const std::string& path,
                      const sme::TrajectoryRecord& rec) {
  csv::Writer w(path);
  std::vector<std::string> names{"t"};
  for (int c : rec.homodyne_channels) {
    names.push_back("dy_" + std::to_string(c + 1));
  }
  for (int c : rec.counting_channels) {
    names.push_back("dN_" + std::to_string(c + 1));
  }
  for (const auto& n : rec.expectation_names) names.push_back(n);
  w.header(names);
  for (Eigen::Index k = 0; k < rec.steps(); ++k) {
    w.begin_row();
    w.field(rec.times(k + 1));
    for (Eigen::Index j = 0; j < rec.dy.cols(); ++j) w.field(rec.dy(k, j));
    for (Eigen::Index j = 0; j < rec.dN.cols(); ++j) {
      w.field(static_cast<long long>(rec.dN(k, j)));
    }
    for (Eigen::Index j = 0; j < rec.expectations.cols(); ++j) {
      w.field(rec.expectations(k + 1, j));
    }
    w.end_row();
  }
  w.close();
}

void write_filter_csv(const std::string& path, const RealVector& times,
                      const RealMatrix& estimates, const RealMatrix& covariances,
                      const RealMatrix& gains, Eigen::Index n, Eigen::Index m) {
  csv::Writer w(path);
  std::vector<std::string> names{"t"};
  for (Eigen::Index i = 0; i < n; ++i) {
    names.push_back("x_hat_" + std::to_string(i + 1));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      names.push_back("P_" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      names.push_back("K_" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  }
  w.header(names);
  const Eigen::Index steps = covariances.rows();
  for (Eigen::Index k = 0; k < steps; ++k) {
    w.begin_row();
    w.field(times(k + 1));
    for (Eigen::Index j = 0; j < n; ++j) w.field(estimates(k + 1, j));
    // covariances/gains store column-major maps of P and K; emit row-major.
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) w.field(covariances(k, j * n + i));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) w.field(gains(k, j * n + i));
    }
    w.end_row();
  }
  w.close();
}

}  // namespace

void emit_outputs(const MetricReport& report, const RunConfig& config,
                  const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("emit_outputs: cannot create '" + dir +
                             "': " + ec.message());
  }
  write_metrics_csv(dir + "/metrics.csv", report.filters);
  write_timing_csv(dir + "/timing.csv", report.timing);

  // bands.csv: one row per post-step time.
  {
    csv::Writer w(dir + "/bands.csv");
    std::vector<std::string> names{"t"};
    const Eigen::Index ncomp =
        report.band_stats.empty() ? 0 : report.band_stats[0].mean.cols();
    for (std::size_t s = 0; s < report.band_names.size(); ++s) {
      for (Eigen::Index c = 0; c < ncomp; ++c) {
        const std::string base =
            report.band_names[s] + "_x" + std::to_string(c + 1);
        names.push_back(base + "_mean");
        names.push_back(base + "_lo");
        names.push_back(base + "_hi");
      }
    }
    w.header(names);
    for (Eigen::Index k = 0; k < report.band_times.size(); ++k) {
      w.begin_row();
      w.field(report.band_times(k));
      for (const auto& stats : report.band_stats) {
        for (Eigen::Index c = 0; c < stats.mean.cols(); ++c) {
          const Real mean = stats.mean(k, c);
          const Real sd = stats.std(k, c);
          w.field(mean);
          w.field(mean - sd);
          w.field(mean + sd);
        }
      }
      w.end_row();
    }
    w.close();
  }

  if (config.write_trajectories) {
    for (std::size_t t = 0; t < report.trials.size(); ++t) {
      const TrialData& trial = report.trials[t];
      write_record_csv(dir + "/sme_trial" + trial_suffix(t) + ".csv",
                       trial.record);
      for (std::size_t fi = 0; fi < config.filters.size(); ++fi) {
        const Eigen::Index n = trial.estimates[fi].cols();
        const Eigen::Index m = trial.gains[fi].cols() / std::max<Eigen::Index>(n, 1);
        write_filter_csv(dir + "/filter_" + config.filters[fi].name() +
                             "_trial" + trial_suffix(t) + ".csv",
                         trial.record.times, trial.estimates[fi],
                         trial.covariances[fi], trial.gains[fi], n, m);
      }
    }
  }

  // Manifest: full configuration, its hash, and the per-trial stream ids.
  json manifest;
  manifest["config"] = json::parse(config_to_json(config));
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  manifest["config_hash"] = hash_hex;
  manifest["master_seed"] = config.master_seed;
  std::vector<std::uint32_t> streams(report.trials.size());
  for (std::size_t t = 0; t < streams.size(); ++t) {
    streams[t] = static_cast<std::uint32_t>(t);
  }
  manifest["trial_streams"] = streams;
  std::ofstream mf(dir + "/manifest.json");
  if (!mf) {
    throw std::runtime_error("emit_outputs: cannot write manifest.json");
  }
  mf << manifest.dump(2) << '\n';
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
  if (config.scenario == ScenarioKind::Counting) {
    throw ConfigError("sweep: only the Kerr family sweeps over alpha");
  }
  std::vector<SweepRow> rows;
  for (Real alpha : config.sweep.alphas) {
    for (int basis : config.sweep.bases) {
      RunConfig cell = config;
      cell.kerr.basis = basis;
      cell.kerr.alpha0.assign(static_cast<std::size_t>(config.kerr.n_modes),
                              Complex{alpha, 0.0});
      cell.write_trajectories = false;
      const MetricReport report = run_compare(cell);
      for (const auto& fm : report.filters) {
        rows.push_back(SweepRow{alpha, basis, fm});
      }
    }
  }
  return rows;
}

void emit_sweep(const std::vector<SweepRow>& rows, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  csv::Writer w(dir + "/mise_sweep.csv");
  w.header({"alpha", "basis", "filter_name", "mise", "divergences", "trials"});
  for (const auto& r : rows) {
    w.begin_row();
    w.field(r.alpha);
    w.field(static_cast<long long>(r.basis));
    w.field(r.metrics.name);
    w.field(r.metrics.mise);
    w.field(static_cast<long long>(r.metrics.divergences));
    w.field(static_cast<long long>(r.metrics.trials));
    w.end_row();
  }
  w.close();
}

namespace {

Complex complex_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(what + ": expected [re, im]");
  }
  return Complex{j[0].get<Real>(), j[1].get<Real>()};
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.contains("config") && j.at("config").is_object()) {
    j = j.at("config");  // manifest wrapper
  }
  RunConfig cfg;

  const std::string scenario = get_or<std::string>(j, "scenario", "kerr");
  if (scenario == "kerr") {
    cfg.scenario = ScenarioKind::Kerr;
  } else if (scenario == "counting") {
    cfg.scenario = ScenarioKind::Counting;
  } else if (scenario == "linear") {
    cfg.scenario = ScenarioKind::Linear;
  } else {
    throw ConfigError("unknown scenario '" + scenario + "'");
  }

  if (j.contains("kerr")) {
    const json& k = j.at("kerr");
    cfg.kerr.n_modes = get_or<int>(k, "n_modes", cfg.kerr.n_modes);
    cfg.kerr.gamma = get_or<Real>(k, "gamma", cfg.kerr.gamma);
    cfg.kerr.chi = get_or<Real>(k, "chi", cfg.kerr.chi);
    cfg.kerr.zeta = get_or<Real>(k, "zeta", cfg.kerr.zeta);
    cfg.kerr.basis = get_or<int>(k, "basis", cfg.kerr.basis);
    if (k.contains("alpha0")) {
      cfg.kerr.alpha0.clear();
      for (const auto& a : k.at("alpha0")) {
        cfg.kerr.alpha0.push_back(complex_from_json(a, "kerr.alpha0"));
      }
    }
    if (k.contains("coupling")) {
      const auto& c = k.at("coupling");
      const int n = static_cast<int>(c.size());
      cfg.kerr.coupling = RealMatrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(c[i].size()) != n) {
          throw ConfigError("kerr.coupling must be square");
        }
        for (int jj = 0; jj < n; ++jj) {
          cfg.kerr.coupling(i, jj) = c[i][jj].get<Real>();
        }
      }
    }
  }

  if (j.contains("counting")) {
    const json& c = j.at("counting");
    // initial_n / initial_alpha default to the basis-derived values unless
    // given explicitly.
    const int basis = get_or<int>(c, "basis", cfg.counting.basis);
    scenarios::CountingParams p = scenarios::default_counting_params(basis);
    p.gamma = get_or<Real>(c, "gamma", p.gamma);
    p.r = get_or<Real>(c, "r", p.r);
    if (c.contains("eta")) {
      p.eta = complex_from_json(c.at("eta"), "counting.eta");
    }
    p.initial_n = get_or<int>(c, "initial_n", p.initial_n);
    if (c.contains("initial_alpha")) {
      p.initial_alpha =
          complex_from_json(c.at("initial_alpha"), "counting.initial_alpha");
    }
    p.intensity_floor = get_or<Real>(c, "intensity_floor", p.intensity_floor);
    cfg.counting = p;
  }

  if (j.contains("sim")) {
    const json& s = j.at("sim");
    cfg.dt = get_or<Real>(s, "dt", cfg.dt);
    cfg.T = get_or<Real>(s, "T", cfg.T);
  }
  if (cfg.dt <= 0.0 || cfg.T < 0.0) {
    throw ConfigError("sim: need dt > 0 and T >= 0");
  }

  if (j.contains("filters")) {
    cfg.filters.clear();
    for (const auto& f : j.at("filters")) {
      FilterSpec spec;
      const std::string type = get_or<std::string>(f, "type", "qekf");
      if (type == "qekf") {
        spec.kind = FilterKind::Qekf;
      } else if (type == "robust-qekf") {
        spec.kind = FilterKind::RobustQekf;
        spec.robust.mu = get_or<Real>(f, "mu", spec.robust.mu);
        spec.robust.lambda = get_or<Real>(f, "lambda", spec.robust.lambda);
        if (spec.robust.mu <= 0.0 || spec.robust.lambda <= 0.0) {
          throw ConfigError("robust-qekf: mu and lambda must be > 0");
        }
      } else if (type == "qkf-linearized") {
        spec.kind = FilterKind::QkfLinearized;
      } else {
        throw ConfigError("unknown filter type '" + type + "'");
      }
      cfg.filters.push_back(spec);
    }
  }

  cfg.trials = get_or<int>(j, "trials", cfg.trials);
  if (cfg.trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", cfg.master_seed);
  cfg.reference_basis = get_or<int>(j, "reference_basis", cfg.reference_basis);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);
  cfg.p0 = get_or<Real>(j, "p0", cfg.p0);
  cfg.p_floor = get_or<Real>(j, "p_floor", cfg.p_floor);
  cfg.write_trajectories =
      get_or<bool>(j, "write_trajectories", cfg.write_trajectories);
  cfg.threads = get_or<int>(j, "threads", cfg.threads);

  if (j.contains("bench")) {
    const json& b = j.at("bench");
    cfg.bench.bases = get_or<std::vector<int>>(b, "bases", cfg.bench.bases);
    cfg.bench.modes = get_or<std::vector<int>>(b, "modes", cfg.bench.modes);
    cfg.bench.repeats = get_or<int>(b, "repeats", cfg.bench.repeats);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    cfg.sweep.alphas = get_or<std::vector<Real>>(s, "alphas", cfg.sweep.alphas);
    cfg.sweep.bases = get_or<std::vector<int>>(s, "bases", cfg.sweep.bases);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  switch (cfg.scenario) {
    case ScenarioKind::Kerr:
      j["scenario"] = "kerr";
      break;
    case ScenarioKind::Counting:
      j["scenario"] = "counting";
      break;
    case ScenarioKind::Linear:
      j["scenario"] = "linear";
      break;
  }
  json k;
  k["n_modes"] = cfg.kerr.n_modes;
  k["gamma"] = cfg.kerr.gamma;
  k["chi"] = cfg.kerr.chi;
  k["zeta"] = cfg.kerr.zeta;
  k["basis"] = cfg.kerr.basis;
  k["alpha0"] = json::array();
  for (Complex a : cfg.kerr.alpha0) k["alpha0"].push_back(complex_to_json(a));
  if (cfg.kerr.coupling.size() != 0) {
    json c = json::array();
    for (Eigen::Index i = 0; i < cfg.kerr.coupling.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index jj = 0; jj < cfg.kerr.coupling.cols(); ++jj) {
        row.push_back(cfg.kerr.coupling(i, jj));
      }
      c.push_back(row);
    }
    k["coupling"] = c;
  }
  j["kerr"] = k;

  json c;
  c["gamma"] = cfg.counting.gamma;
  c["eta"] = complex_to_json(cfg.counting.eta);
  c["r"] = cfg.counting.r;
  c["basis"] = cfg.counting.basis;
  c["initial_n"] = cfg.counting.initial_n;
  c["initial_alpha"] = complex_to_json(cfg.counting.initial_alpha);
  c["intensity_floor"] = cfg.counting.intensity_floor;
  j["counting"] = c;

  j["sim"] = json{{"dt", cfg.dt}, {"T", cfg.T}};
  j["filters"] = json::array();
  for (const auto& f : cfg.filters) {
    json spec;
    spec["type"] = f.name();
    if (f.kind == FilterKind::RobustQekf) {
      spec["mu"] = f.robust.mu;
      spec["lambda"] = f.robust.lambda;
    }
    j["filters"].push_back(spec);
  }
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["reference_basis"] = cfg.reference_basis;
  j["output_dir"] = cfg.output_dir;
  j["p0"] = cfg.p0;
  j["p_floor"] = cfg.p_floor;
  j["write_trajectories"] = cfg.write_trajectories;
  j["threads"] = cfg.threads;
  j["bench"] = json{{"bases", cfg.bench.bases},
                    {"modes", cfg.bench.modes},
                    {"repeats", cfg.bench.repeats}};
  j["sweep"] = json{{"alphas", cfg.sweep.alphas}, {"bases", cfg.sweep.bases}};
  return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // FNV-1a over the canonical JSON form.
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace qfilt::harness
