// Command-line front end: trajectory simulation, filtering, Monte Carlo
// comparison, step-cost benchmarking and amplitude sweeps, all driven by a
// JSON configuration document.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qfilt/csv.hpp"
#include "qfilt/harness.hpp"

namespace {

using namespace qfilt;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file");
  cmd->add_option("--seed", args.seed, "master seed override");
  cmd->add_option("--trials", args.trials, "trial count override");
  cmd->add_option("--out", args.out_dir, "output directory override");
}

harness::RunConfig load(const CommonArgs& args) {
  harness::RunConfig cfg;
  if (!args.config_path.empty()) {
    cfg = harness::parse_config_file(args.config_path);
  }
  if (args.seed) cfg.master_seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.out_dir) cfg.output_dir = *args.out_dir;
  if (cfg.trials < 1) throw harness::ConfigError("trials must be >= 1");
  return cfg;
}

int cmd_simulate(const harness::RunConfig& cfg, bool with_filters) {
  harness::RunConfig run = cfg;
  if (!with_filters) run.filters.clear();
  run.write_trajectories = true;
  const harness::MetricReport report = harness::run_compare(run);
  harness::emit_outputs(report, run, run.output_dir);
  // Divergence is fatal outside compare mode.
  for (const auto& fm : report.filters) {
    if (fm.divergences > 0) {
      std::fprintf(stderr, "error: filter %s diverged in %d of %d trials\n",
                   fm.name.c_str(), fm.divergences, fm.trials);
      return 3;
    }
  }
  std::printf("wrote %zu trial(s) to %s\n", report.trials.size(),
              run.output_dir.c_str());
  return 0;
}

int cmd_compare(const harness::RunConfig& cfg) {
  const harness::MetricReport report = harness::run_compare(cfg);
  harness::emit_outputs(report, cfg, cfg.output_dir);
  for (const auto& fm : report.filters) {
    std::printf("%-16s mise %.6g  divergences %d/%d\n", fm.name.c_str(),
                fm.mise, fm.divergences, fm.trials);
  }
  return 0;
}

int cmd_bench(const harness::RunConfig& cfg) {
  const auto rows = harness::bench_step(cfg);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  csv::Writer w(cfg.output_dir + "/timing.csv");
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
  for (const auto& r : rows) {
    std::printf("N_s %3d modes %d  sme %.3e s  qekf %.3e s  ratio %.1f\n",
                r.basis, r.modes, r.t_sme_step, r.t_qekf_step, r.ratio);
  }
  for (int modes : cfg.bench.modes) {
    int count = 0;
    for (const auto& r : rows) count += (r.modes == modes);
    if (count >= 2) {
      std::printf("modes %d: log-log step-cost slope %.2f\n", modes,
                  harness::cost_scaling_slope(rows, modes));
    }
  }
  return 0;
}

int cmd_sweep(const harness::RunConfig& cfg) {
  const auto rows = harness::run_sweep(cfg);
  harness::emit_sweep(rows, cfg.output_dir);
  for (const auto& r : rows) {
    std::printf("alpha %.2f basis %2d %-16s mise %.6g\n", r.alpha, r.basis,
                r.metrics.name.c_str(), r.metrics.mise);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum trajectory / extended Kalman filtering toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate conditional trajectories and write records");
  CLI::App* filter = app.add_subcommand(
      "filter", "run the configured filters over simulated records");
  CLI::App* compare = app.add_subcommand(
      "compare", "Monte Carlo comparison against the reference trajectory");
  CLI::App* bench = app.add_subcommand(
      "bench", "per-step cost of the master-equation and filter updates");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "error metric across initial amplitudes and basis sizes");
  for (CLI::App* cmd : {simulate, filter, compare, bench, sweep}) {
    add_common(cmd, args);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const harness::RunConfig cfg = load(args);
    if (simulate->parsed()) return cmd_simulate(cfg, false);
    if (filter->parsed()) return cmd_simulate(cfg, true);
    if (compare->parsed()) return cmd_compare(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
  } catch (const qfilt::harness::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qfilt::DivergenceError& e) {
    std::fprintf(stderr, "numerical divergence: %s\n", e.what());
    return 3;
  } catch (const qfilt::sme::SmeError& e) {
    std::fprintf(stderr, "numerical divergence: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
