#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtmvdr/asymptotics.hpp"
#include "rtmvdr/errors.hpp"
#include "rtmvdr/mvdr.hpp"
#include "rtmvdr/parallel.hpp"
#include "rtmvdr/rte.hpp"
#include "rtmvdr/scenario.hpp"
#include "rtmvdr/stats.hpp"

namespace rtmvdr {

enum class Regime { LargeN, LargeNn };

inline const char* regime_name(Regime r) {
  return r == Regime::LargeN ? "large_n" : "large_nn";
}

struct ExperimentConfig {
  Scenario scenario;
  std::vector<double> rho_list;
  std::vector<int> n_list;
  int n_trials = 5000;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  int histogram_bins = 64;
  int workers = 1;
  double rte_tol = 1e-10;
  int rte_max_iter = 500;
  int calibration_samples = 2000;  // n_cal for M1/M2
  int calibration_reps = 400;

  void validate() const {
    scenario.validate();
    if (n_trials < 100) throw InvalidScenario("n_trials must be >= 100");
    for (double rho : rho_list)
      for (int n : n_list) check_rho(rho, n, scenario.n_sensors);
  }
};

/// Standardized SNR deviations for one (rho, n) cell, with provenance.
struct SampleSet {
  std::vector<double> values;
  Regime regime = Regime::LargeN;
  int n = 0;
  int n_sensors = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

/// Raw RTE-based output SNR over n_trials independent trials; trial t uses
/// substream (seed, t) so results are order- and worker-independent.
inline std::vector<double> raw_snr_samples(const ExperimentConfig& cfg,
                                           double rho, int n) {
  const MatrixXcd sigma = build_covariance(cfg.scenario);
  const VectorXcd s0 =
      steering_vector(cfg.scenario.look_spatial_freq, cfg.scenario.n_sensors);
  std::vector<double> snr(cfg.n_trials);
  std::vector<std::string> errors(cfg.n_trials);
  parallel_for(cfg.n_trials, cfg.workers, [&](int t) {
    try {
      std::uint64_t sub = mix64(cfg.seed ^ mix64(stream::kTrials) ^
                                mix64(static_cast<std::uint64_t>(t)));
      SnapshotBatch batch = sample_snapshots(cfg.scenario, n, sub);
      RteEstimate est = solve_rte(batch, rho, cfg.rte_tol, cfg.rte_max_iter);
      snr[t] = output_snr(est.matrix, sigma, s0);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });
  for (int t = 0; t < cfg.n_trials; ++t)
    if (!errors[t].empty())
      throw NonConvergence("trial " + std::to_string(t) + ": " + errors[t]);
  return snr;
}

/// Q_n = sigma_n^{-1} sqrt(n) (SNR_hat - SNR_0), Theorem-2 standardization.
inline SampleSet run_clt_large_n(const ExperimentConfig& cfg, double rho, int n,
                                 const LargeNParams& params) {
  if (rho == 1.0 || params.sigma_n == 0.0)
    throw DegenerateRho("sigma_n = 0: SNR is deterministic, Q_n undefined");
  std::vector<double> snr = raw_snr_samples(cfg, rho, n);
  SampleSet out{{}, Regime::LargeN, n, cfg.scenario.n_sensors, rho, cfg.seed};
  out.values.resize(snr.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < snr.size(); ++i)
    out.values[i] = root_n * (snr[i] - params.snr0) / params.sigma_n;
  return out;
}

inline SampleSet run_clt_large_n(const ExperimentConfig& cfg, double rho, int n) {
  LargeNParams params =
      build_large_n_params(cfg.scenario, rho, cfg.seed, cfg.calibration_samples,
                           cfg.calibration_reps);
  return run_clt_large_n(cfg, rho, n, params);
}

/// Q_{N,n}: the same raw SNR draws standardized by the equivalent-model
/// surrogates, sigma_{N,n} = sqrt(n) * scale and center from Theorem 1's
/// Gaussian-equivalent matrix.
inline SampleSet run_clt_large_nn(const ExperimentConfig& cfg, double rho, int n,
                                  const LargeNnParams& params) {
  std::vector<double> snr = raw_snr_samples(cfg, rho, n);
  SampleSet out{{}, Regime::LargeNn, n, cfg.scenario.n_sensors, rho, cfg.seed};
  out.values.resize(snr.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  const double sigma_nn = root_n * params.scale;
  for (std::size_t i = 0; i < snr.size(); ++i)
    out.values[i] = root_n * (snr[i] - params.center) / sigma_nn;
  return out;
}

inline SampleSet run_clt_large_nn(const ExperimentConfig& cfg, double rho, int n) {
  LargeNnParams params = large_nn_center_scale(
      cfg.scenario, rho, n, cfg.n_trials, mix64(cfg.seed ^ stream::kEquivalent));
  return run_clt_large_nn(cfg, rho, n, params);
}

// ---------------------------------------------------------------------------
// Divergence sweep + CSV
// ---------------------------------------------------------------------------

struct SweepRow {
  std::string regime;
  int n_sensors = 0;
  int n = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  int n_trials = 0;
  std::optional<DivergenceReport> report;
  std::string error;  // empty on success
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detail

inline std::string csv_header() {
  return "regime,N,n,rho,seed,n_trials,ks,hellinger,tv,sym_kl,error";
}

inline std::string to_csv_row(const SweepRow& row) {
  std::ostringstream os;
  os << row.regime << ',' << row.n_sensors << ',' << row.n << ','
     << detail::fmt_double(row.rho) << ',' << row.seed << ',' << row.n_trials
     << ',';
  if (row.report) {
    os << detail::fmt_double(row.report->ks) << ','
       << detail::fmt_double(row.report->hellinger) << ','
       << detail::fmt_double(row.report->total_variation) << ','
       << detail::fmt_double(row.report->sym_kl) << ',';
  } else {
    os << ",,,,";
  }
  os << row.error;
  return os.str();
}

inline DivergenceReport against_standard_normal(const SampleSet& set,
                                                int histogram_bins) {
  EmpiricalDistribution emp = make_empirical(set.values, histogram_bins);
  return divergence_report(emp, standard_normal_cdf, standard_normal_pdf);
}

/// One CSV row per (rho, n, regime); cell failures are recorded in the error
/// column and the sweep continues.
inline std::vector<SweepRow> divergence_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  for (double rho : cfg.rho_list) {
    std::optional<LargeNParams> large_n;
    std::string large_n_error;
    try {
      large_n = build_large_n_params(cfg.scenario, rho, cfg.seed,
                                     cfg.calibration_samples,
                                     cfg.calibration_reps);
    } catch (const std::exception& e) {
      large_n_error = e.what();
    }
    for (int n : cfg.n_list) {
      SweepRow base;
      base.n_sensors = cfg.scenario.n_sensors;
      base.n = n;
      base.rho = rho;
      base.seed = cfg.seed;
      base.n_trials = cfg.n_trials;

      SweepRow row_n = base;
      row_n.regime = regime_name(Regime::LargeN);
      try {
        if (!large_n) throw NonConvergence(large_n_error);
        SampleSet set = run_clt_large_n(cfg, rho, n, *large_n);
        row_n.report = against_standard_normal(set, cfg.histogram_bins);
      } catch (const std::exception& e) {
        row_n.error = e.what();
      }
      rows.push_back(row_n);

      SweepRow row_nn = base;
      row_nn.regime = regime_name(Regime::LargeNn);
      try {
        SampleSet set = run_clt_large_nn(cfg, rho, n);
        row_nn.report = against_standard_normal(set, cfg.histogram_bins);
      } catch (const std::exception& e) {
        row_nn.error = e.what();
      }
      rows.push_back(row_nn);
    }
  }
  return rows;
}

inline void write_csv(const std::vector<SweepRow>& rows,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << csv_header() << '\n';
  for (const auto& row : rows) out << to_csv_row(row) << '\n';
}

inline std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw IoError("unrecognized CSV header in " + path);
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(11);
    SweepRow row;
    row.regime = cells[0];
    row.n_sensors = std::stoi(cells[1]);
    row.n = std::stoi(cells[2]);
    row.rho = std::stod(cells[3]);
    row.seed = std::stoull(cells[4]);
    row.n_trials = std::stoi(cells[5]);
    if (!cells[6].empty()) {
      DivergenceReport rep;
      rep.ks = std::stod(cells[6]);
      rep.hellinger = std::stod(cells[7]);
      rep.total_variation = std::stod(cells[8]);
      rep.sym_kl = std::stod(cells[9]);
      row.report = rep;
    }
    row.error = cells[10];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rtmvdr
