// Command-line front end: RTE solving, asymptotic parameters, CLT sample
// generation, divergence sweeps, and figure rendering over flat CSV files.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtmvdr/rtmvdr.hpp"

namespace {

using namespace rtmvdr;

struct CommonOpts {
  std::string config = "configs/default.json";
  double rho = 0.65;
  int n = 40;
  int trials = 5000;
  std::uint64_t seed = 0;  // 0 = take from config
  int workers = 1;
  int bins = 64;
  double tol = 1e-10;
  int max_iter = 500;
  int cal_samples = 2000;
  int cal_reps = 400;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_trials) {
  cmd->add_option("--config", o.config, "scenario config (JSON)");
  cmd->add_option("--rho", o.rho, "regularization parameter");
  cmd->add_option("--seed", o.seed, "seed override (0 = config seed)");
  cmd->add_option("--workers", o.workers, "worker thread count");
  cmd->add_option("--tol", o.tol, "RTE solver tolerance");
  cmd->add_option("--max-iter", o.max_iter, "RTE solver iteration cap");
  if (with_trials) {
    cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    cmd->add_option("--bins", o.bins, "histogram bins (0 = Freedman-Diaconis)");
    cmd->add_option("--cal-samples", o.cal_samples,
                    "snapshots per calibration replication");
    cmd->add_option("--cal-reps", o.cal_reps, "calibration replications");
    cmd->add_option("--out", o.out_dir, "output directory");
  }
}

ExperimentConfig make_experiment(const CommonOpts& o) {
  ScenarioConfig sc = load_scenario(o.config);
  ExperimentConfig cfg;
  cfg.scenario = sc.scenario;
  cfg.seed = o.seed != 0 ? o.seed : sc.seed;
  cfg.n_trials = o.trials;
  cfg.workers = o.workers;
  cfg.histogram_bins = o.bins;
  cfg.rte_tol = o.tol;
  cfg.rte_max_iter = o.max_iter;
  cfg.calibration_samples = o.cal_samples;
  cfg.calibration_reps = o.cal_reps;
  cfg.output_dir = o.out_dir;
  return cfg;
}

int cmd_solve_rte(const CommonOpts& o) {
  ExperimentConfig cfg = make_experiment(o);
  SnapshotBatch batch = sample_snapshots(cfg.scenario, o.n, cfg.seed);
  RteEstimate est = solve_rte(batch, o.rho, o.tol, o.max_iter);
  MatrixXcd sigma = build_covariance(cfg.scenario);
  VectorXcd s0 = steering_vector(cfg.scenario.look_spatial_freq,
                                 cfg.scenario.n_sensors);
  std::printf("N=%d n=%d rho=%g\n", cfg.scenario.n_sensors, o.n, o.rho);
  std::printf("iterations=%d residual=%.3e\n", est.iterations, est.residual);
  std::printf("independent residual=%.3e\n", rte_residual(est.matrix, batch, o.rho));
  double snr = output_snr(est.matrix, sigma, s0);
  double opt = oracle_snr(sigma, s0);
  std::printf("output SNR = %.6f dB (optimum %.6f dB)\n",
              10.0 * std::log10(snr), 10.0 * std::log10(opt));
  return 0;
}

int cmd_asymptotics(const CommonOpts& o) {
  ExperimentConfig cfg = make_experiment(o);
  MatrixXcd sigma = build_covariance(cfg.scenario);
  VectorXcd s0 = steering_vector(cfg.scenario.look_spatial_freq,
                                 cfg.scenario.n_sensors);
  double gamma = solve_gamma(sigma, o.rho);
  double c_ratio = static_cast<double>(cfg.scenario.n_sensors) / o.n;
  double alpha = compute_alpha(o.rho, gamma, c_ratio);
  double delta = solve_delta(sigma, alpha, o.n);
  std::printf("gamma=%.12g alpha=%.12g delta=%.12g (c_N=%.6g)\n", gamma, alpha,
              delta, c_ratio);
  LargeNParams params = build_large_n_params(cfg.scenario, o.rho, cfg.seed);
  std::printf("SNR0=%.12g sigma_n=%.12g\n", params.snr0, params.sigma_n);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(params.sigma0, Eigen::EigenvaluesOnly);
  std::printf("Sigma0 eigenvalues:");
  for (int k = 0; k < es.eigenvalues().size(); ++k)
    std::printf(" %.12g", es.eigenvalues()(k));
  std::printf("\n");
  (void)s0;
  return 0;
}

int cmd_clt(const CommonOpts& o, const std::string& regime) {
  ExperimentConfig cfg = make_experiment(o);
  std::vector<SampleSet> sets;
  if (regime == "large_n" || regime == "both")
    sets.push_back(run_clt_large_n(cfg, o.rho, o.n));
  if (regime == "large_nn" || regime == "both")
    sets.push_back(run_clt_large_nn(cfg, o.rho, o.n));
  for (const auto& set : sets) {
    DivergenceReport rep = against_standard_normal(set, cfg.histogram_bins);
    std::printf("%s: ks=%.4f hellinger=%.4f tv=%.4f sym_kl=%.4f\n",
                regime_name(set.regime), rep.ks, rep.hellinger,
                rep.total_variation, rep.sym_kl);
    std::string samples_path = cfg.output_dir + "/samples_" +
                               regime_name(set.regime) + ".csv";
    std::ofstream samples(samples_path, std::ios::binary);
    if (!samples) throw IoError("cannot open " + samples_path);
    samples << "value\n";
    for (double v : set.values) samples << detail::fmt_double(v) << '\n';
    std::string fig = cfg.output_dir + "/cdf_" + regime_name(set.regime) + ".svg";
    emit_cdf_overlay(set, fig);
    std::printf("wrote %s and %s\n", samples_path.c_str(), fig.c_str());
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, std::vector<double> rho_list,
              std::vector<int> n_list, const std::string& csv_path) {
  ExperimentConfig cfg = make_experiment(o);
  cfg.rho_list = std::move(rho_list);
  cfg.n_list = std::move(n_list);
  std::vector<SweepRow> rows = divergence_sweep(cfg);
  write_csv(rows, csv_path);
  int failures = 0;
  for (const auto& row : rows)
    if (!row.error.empty()) ++failures;
  std::printf("wrote %zu rows to %s (%d cell errors)\n", rows.size(),
              csv_path.c_str(), failures);
  return failures == 0 ? 0 : 2;
}

int cmd_render(const std::string& csv_path, const std::string& out_dir) {
  std::vector<SweepRow> rows = read_csv(csv_path);
  for (const auto& path : emit_figures(rows, out_dir))
    std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RTE-based MVDR beamformer SNR fluctuation laboratory"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string regime = "both";
  std::vector<double> rho_list{0.65};
  std::vector<int> n_list{20, 40, 60, 80, 100};
  std::string csv_path = "sweep.csv";
  std::string render_out = ".";

  auto* solve = app.add_subcommand("solve-rte", "solve the RTE fixed point");
  add_common(solve, o, false);
  solve->add_option("--n", o.n, "number of snapshots");

  auto* asym = app.add_subcommand("asymptotics", "deterministic CLT parameters");
  add_common(asym, o, false);
  asym->add_option("--n", o.n, "number of snapshots (for alpha, delta)");

  auto* clt = app.add_subcommand("clt", "generate standardized SNR samples");
  add_common(clt, o, true);
  clt->add_option("--n", o.n, "number of snapshots");
  clt->add_option("--regime", regime, "large_n | large_nn | both")
      ->check(CLI::IsMember({"large_n", "large_nn", "both"}));

  auto* sweep = app.add_subcommand("sweep", "divergence sweep over (rho, n)");
  add_common(sweep, o, true);
  sweep->add_option("--rho-list", rho_list, "rho grid");
  sweep->add_option("--n-list", n_list, "snapshot-count grid");
  sweep->add_option("--csv", csv_path, "output CSV path");

  auto* render = app.add_subcommand("render", "render figures from a sweep CSV");
  render->add_option("--csv", csv_path, "input CSV path");
  render->add_option("--out", render_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve_rte(o);
    if (asym->parsed()) return cmd_asymptotics(o);
    if (clt->parsed()) return cmd_clt(o, regime);
    if (sweep->parsed()) return cmd_sweep(o, rho_list, n_list, csv_path);
    if (render->parsed()) return cmd_render(csv_path, render_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
