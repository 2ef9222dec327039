#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "rtmvdr/errors.hpp"
#include "rtmvdr/mvdr.hpp"
#include "rtmvdr/quadrature.hpp"
#include "rtmvdr/rng.hpp"
#include "rtmvdr/rte.hpp"
#include "rtmvdr/scenario.hpp"

namespace rtmvdr {

// ---------------------------------------------------------------------------
// Large-(N,n) fixed-point system
// ---------------------------------------------------------------------------

/// gamma solving 1 = (1/N) tr[Sigma (rho gamma I + (1-rho) Sigma)^{-1}]
/// by bisection; the trace map is strictly decreasing in gamma.
inline double solve_gamma(const MatrixXcd& sigma, double rho,
                          double tol = 1e-12) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidRho("solve_gamma needs rho in (0,1)");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma, Eigen::EigenvaluesOnly);
  VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) throw NoBracket("Sigma is not positive definite");
  const int N = static_cast<int>(lam.size());
  auto trace_expr = [&](double g) {
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += lam(k) / (rho * g + (1.0 - rho) * lam(k));
    return acc / N;
  };
  double lo = 1e-12;
  double hi = lam.sum() / N * 1e6;
  if (trace_expr(lo) < 1.0 || trace_expr(hi) > 1.0)
    throw NoBracket("bisection bracket failed for gamma");
  while (hi - lo > tol * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    (trace_expr(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// alpha(rho) = rho gamma (1 - (1-rho) c_N) / (1 - rho).
inline double compute_alpha(double rho, double gamma, double c_ratio) {
  if (rho == 1.0) throw DegenerateRho("alpha diverges at rho = 1");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidRho("rho must lie in (0,1)");
  double factor = 1.0 - (1.0 - rho) * c_ratio;
  if (factor <= 0.0)
    throw InvalidRegime("rho is below the admissible interval for this N/n");
  return rho * gamma * factor / (1.0 - rho);
}

/// delta solving delta = (1/n) tr[Sigma (Sigma/(1+delta) + alpha I)^{-1}],
/// damped Picard iteration from delta = N/n.
inline double solve_delta(const MatrixXcd& sigma, double alpha, int n,
                          double tol = 1e-12, int max_iter = 10000) {
  if (alpha <= 0.0) throw InvalidRegime("alpha must be > 0");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma, Eigen::EigenvaluesOnly);
  VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) throw SingularMatrix("Sigma is not positive definite");
  const int N = static_cast<int>(lam.size());
  auto map = [&](double d) {
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += lam(k) / (lam(k) / (1.0 + d) + alpha);
    return acc / n;
  };
  double d = static_cast<double>(N) / n;
  for (int it = 0; it < max_iter; ++it) {
    double next = map(d);
    if (std::abs(next - d) <= tol * std::max(1.0, std::abs(d))) return next;
    d = 0.5 * d + 0.5 * next;
  }
  throw NonConvergence("delta fixed point did not converge");
}

/// One random draw of the Gaussian-equivalent loaded sample covariance
///   S_tilde = (1/n) sum_i z_i z_i^* + alpha I,  z_i = Sigma^{1/2} w_i.
inline MatrixXcd gaussian_equivalent_s_tilde(const MatrixXcd& sigma_root,
                                             double alpha, int n,
                                             std::uint64_t seed) {
  if (alpha <= 0.0) throw InvalidRegime("alpha must be > 0");
  const int N = static_cast<int>(sigma_root.rows());
  MatrixXcd z(N, n);
  for (int i = 0; i < n; ++i) {
    auto gen = substream(seed, stream::kEquivalent, static_cast<std::uint64_t>(i));
    z.col(i) = sigma_root * complex_gaussian(N, gen);
  }
  MatrixXcd s = (z * z.adjoint()) / static_cast<double>(n);
  s.diagonal().array() += alpha;
  return (s + s.adjoint()) / 2.0;
}

/// Empirical center/scale surrogate for the large-(N,n) CLT: mean and
/// standard deviation of the output SNR under the equivalent loaded model.
struct LargeNnParams {
  double gamma = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double c_ratio = 0.0;
  double center = 0.0;  // mean of the equivalent-model SNR
  double scale = 0.0;   // std of the equivalent-model SNR
};

inline LargeNnParams large_nn_center_scale(const Scenario& s, double rho, int n,
                                           int n_trials, std::uint64_t seed) {
  MatrixXcd sigma = build_covariance(s);
  MatrixXcd root = hermitian_sqrt(sigma);
  VectorXcd s0 = steering_vector(s.look_spatial_freq, s.n_sensors);
  LargeNnParams p;
  p.c_ratio = static_cast<double>(s.n_sensors) / n;
  p.gamma = solve_gamma(sigma, rho);
  p.alpha = compute_alpha(rho, p.gamma, p.c_ratio);
  p.delta = solve_delta(sigma, p.alpha, n);

  double sum = 0.0, sumsq = 0.0;
  for (int t = 0; t < n_trials; ++t) {
    std::uint64_t sub = mix64(seed ^ mix64(static_cast<std::uint64_t>(t)));
    MatrixXcd st = gaussian_equivalent_s_tilde(root, p.alpha, n, sub);
    double snr = output_snr(st, sigma, s0);
    sum += snr;
    sumsq += snr * snr;
  }
  p.center = sum / n_trials;
  double var = (sumsq - sum * sum / n_trials) / (n_trials - 1);
  p.scale = std::sqrt(std::max(0.0, var));
  return p;
}

// ---------------------------------------------------------------------------
// Large-n system: Sigma_0, delta-method variance
// ---------------------------------------------------------------------------

/// Sigma_0 solving Sigma_0 = N (1-rho) E[x x^* / (x^* Sigma_0^{-1} x)] + rho I.
/// Sigma_0 shares eigenvectors with Sigma, so the fixed point reduces to the
/// eigenvalues d_k:
///   d_k = N (1-rho) lambda_k E_k(d) + rho,
///   E_k(d) = integral_0^inf (1 + t a_k)^{-2} prod_{j != k} (1 + t a_j)^{-1} dt
/// with a_j = lambda_j / d_j, using the exponential representation of
/// E[|w_k|^2 / sum_j a_j |w_j|^2] for standard complex Gaussian w.
inline MatrixXcd solve_sigma0(const MatrixXcd& sigma, double rho,
                              double tol = 1e-12, int max_iter = 2000) {
  if (!(rho > 0.0 && rho <= 1.0)) throw InvalidRho("solve_sigma0 needs rho in (0,1]");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma);
  VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) throw SingularMatrix("Sigma is not positive definite");
  const int N = static_cast<int>(lam.size());
  if (rho == 1.0) return MatrixXcd::Identity(N, N);

  VectorXd d = VectorXd::Ones(N);
  for (int it = 0; it < max_iter; ++it) {
    VectorXd a = lam.cwiseQuotient(d);
    VectorXd next(N);
    for (int k = 0; k < N; ++k) {
      auto integrand = [&](double t) {
        double val = 1.0 / ((1.0 + t * a(k)) * (1.0 + t * a(k)));
        for (int j = 0; j < N; ++j)
          if (j != k) val /= 1.0 + t * a(j);
        return val;
      };
      double ek = integrate_halfline(integrand, 1e-13);
      next(k) = N * (1.0 - rho) * lam(k) * ek + rho;
    }
    double res = (next - d).cwiseAbs().maxCoeff() / d.cwiseAbs().maxCoeff();
    d = next;
    if (res <= tol) {
      MatrixXcd s0 = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
      return (s0 + s0.adjoint()) / 2.0;
    }
  }
  throw NonConvergence("Sigma_0 fixed point did not converge");
}

/// Empirical covariance / pseudo-covariance of sqrt(n) vec(C_hat - Sigma_0)
/// from n_reps independent calibration runs.
struct M1M2 {
  Eigen::MatrixXcd m1;  // Hermitian PSD, N^2 x N^2
  Eigen::MatrixXcd m2;  // symmetric, N^2 x N^2
};

inline M1M2 estimate_m1_m2(const Scenario& s, double rho, int n_cal, int n_reps,
                           std::uint64_t seed, const MatrixXcd& sigma0,
                           double rte_tol = 1e-10, int rte_max_iter = 500) {
  const int N = s.n_sensors;
  const int NN = N * N;
  MatrixXcd m1 = MatrixXcd::Zero(NN, NN);
  MatrixXcd m2 = MatrixXcd::Zero(NN, NN);
  const double root_n = std::sqrt(static_cast<double>(n_cal));
  for (int r = 0; r < n_reps; ++r) {
    std::uint64_t sub = mix64(seed ^ mix64(stream::kCalibration) ^
                              mix64(static_cast<std::uint64_t>(r)));
    SnapshotBatch batch = sample_snapshots(s, n_cal, sub);
    RteEstimate est = solve_rte(batch, rho, rte_tol, rte_max_iter);
    MatrixXcd dev = est.matrix - sigma0;
    Eigen::Map<const VectorXcd> y(dev.data(), NN);  // column-major vec
    VectorXcd yy = root_n * y;
    m1.noalias() += yy * yy.adjoint();
    m2.noalias() += yy * yy.transpose();
  }
  m1 /= n_reps;
  m2 /= n_reps;
  return {(m1 + m1.adjoint()) / 2.0, (m2 + m2.transpose()) / 2.0};
}

/// Xi = 1/2 [ Re(M1)+Re(M2)   -Im(M1)+Im(M2) ]
///          [ Im(M1)+Im(M2)    Re(M1)-Re(M2) ]
inline MatrixXd assemble_xi(const MatrixXcd& m1, const MatrixXcd& m2) {
  if (m1.rows() != m1.cols() || m2.rows() != m2.cols() || m1.rows() != m2.rows())
    throw DimensionMismatch("M1 and M2 must be square with equal size");
  const auto k = m1.rows();
  MatrixXd xi(2 * k, 2 * k);
  xi.topLeftCorner(k, k) = m1.real() + m2.real();
  xi.topRightCorner(k, k) = -m1.imag() + m2.imag();
  xi.bottomLeftCorner(k, k) = m1.imag() + m2.imag();
  xi.bottomRightCorner(k, k) = m1.real() - m2.real();
  return xi / 2.0;
}

namespace detail {

/// Row functional x -> conj(u)_i v_j on column-major vec indices, i.e. the
/// row vector r with r vec(A) = u^* A v.
inline VectorXcd quad_form_row(const VectorXcd& u, const VectorXcd& v) {
  const auto n = u.size();
  MatrixXcd outer = u.conjugate() * v.transpose();
  return Eigen::Map<const VectorXcd>(outer.data(), n * n);
}

}  // namespace detail

/// Gradient (as a column vector c, with c^* the displayed row functional) of
/// the SNR functional C -> (s0^* C^{-1} s0)^2 / (s0^* C^{-1} Sigma C^{-1} s0)
/// at C = Sigma_0, acting on vec(C - Sigma_0):
///   c^* = a^2/b^2 [ s0^* B ((Sigma0^{-1} s0)^t x I) + s0^* Sigma0^{-1} ((B s0)^t x I) ]
///         - 2 a/b  s0^* Sigma0^{-1} ((Sigma0^{-1} s0)^t x I)
/// with B = Sigma0^{-1} Sigma Sigma0^{-1}, a = s0^* Sigma0^{-1} s0, b = s0^* B s0.
inline VectorXcd compute_c_vector(const MatrixXcd& sigma,
                                  const MatrixXcd& sigma0,
                                  const VectorXcd& s0) {
  auto ldlt = detail::factorize_pd(sigma0);
  VectorXcd u = ldlt.solve(s0);            // Sigma0^{-1} s0
  VectorXcd bs0 = ldlt.solve(sigma * u);   // B s0
  double a = s0.dot(u).real();
  double b = u.dot(sigma * u).real();      // s0^* B s0 = u^* Sigma u

  VectorXcd r1 = detail::quad_form_row(u, u);     // s0^* Sigma0^{-1} [...u]
  VectorXcd r2 = detail::quad_form_row(u, bs0);   // s0^* Sigma0^{-1} [...Bs0]
  VectorXcd r3 = detail::quad_form_row(bs0, u);   // s0^* B [...u]

  VectorXcd c_star = (a * a) / (b * b) * (r3 + r2) - 2.0 * a / b * r1;
  return c_star.conjugate();  // stored as a column
}

/// sigma_n = sqrt(c_tilde^t Xi c_tilde), c_tilde = [Re(c); Im(c)].
inline double delta_method_sigma_n(const VectorXcd& c, const MatrixXd& xi) {
  const auto k = c.size();
  if (xi.rows() != 2 * k || xi.cols() != 2 * k)
    throw DimensionMismatch("Xi must be 2 N^2 x 2 N^2");
  VectorXd ct(2 * k);
  ct.head(k) = c.real();
  ct.tail(k) = c.imag();
  double var = ct.dot(xi * ct);
  if (var < -1e-8) throw NegativeVariance("c~' Xi c~ is significantly negative");
  return std::sqrt(std::max(0.0, var));
}

/// SNR_0 = (s0^* Sigma0^{-1} s0)^2 / (s0^* B s0); same functional as
/// output_snr(Sigma0, Sigma, s0).
inline double snr0(const MatrixXcd& sigma, const MatrixXcd& sigma0,
                   const VectorXcd& s0) {
  return output_snr(sigma0, sigma, s0);
}

/// Everything Theorem-2-side for one (scenario, rho): Sigma_0, SNR_0, the
/// delta-method gradient, Xi from calibrated M1/M2, and sigma_n.
struct LargeNParams {
  MatrixXcd sigma0;
  double snr0 = 0.0;
  VectorXcd c;
  MatrixXd xi;
  double sigma_n = 0.0;
};

inline LargeNParams build_large_n_params(const Scenario& s, double rho,
                                         std::uint64_t seed, int n_cal = 2000,
                                         int n_reps = 400) {
  MatrixXcd sigma = build_covariance(s);
  VectorXcd s0 = steering_vector(s.look_spatial_freq, s.n_sensors);
  LargeNParams p;
  p.sigma0 = solve_sigma0(sigma, rho, 1e-10);
  p.snr0 = snr0(sigma, p.sigma0, s0);
  p.c = compute_c_vector(sigma, p.sigma0, s0);
  if (rho == 1.0) {
    const int NN = s.n_sensors * s.n_sensors;
    p.xi = MatrixXd::Zero(2 * NN, 2 * NN);
    p.sigma_n = 0.0;
    return p;
  }
  M1M2 m = estimate_m1_m2(s, rho, n_cal, n_reps, seed, p.sigma0);
  p.xi = assemble_xi(m.m1, m.m2);
  p.sigma_n = delta_method_sigma_n(p.c, p.xi);
  return p;
}

}  // namespace rtmvdr
