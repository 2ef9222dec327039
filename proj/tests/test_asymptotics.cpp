#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"

using namespace rtmvdr;
using rtmvdr::testing::reference_scenario;
using rtmvdr::testing::white_scenario;

namespace {

double gamma_trace_residual(const MatrixXcd& sigma, double rho, double gamma) {
  const int n = static_cast<int>(sigma.rows());
  MatrixXcd m = rho * gamma * MatrixXcd::Identity(n, n) + (1.0 - rho) * sigma;
  return std::abs((sigma * m.inverse()).trace().real() / n - 1.0);
}

/// Positive root of alpha d^2 + (1 + alpha - N/n) d - N/n = 0, the scalar
/// reduction of the delta fixed point for Sigma = I.
double delta_quadratic_root(double alpha, double ratio) {
  double b = 1.0 + alpha - ratio;
  return (-b + std::sqrt(b * b + 4.0 * alpha * ratio)) / (2.0 * alpha);
}

}  // namespace

TEST_CASE("gamma solver recovers the scalar solution for Sigma = s I") {
  for (double s2 : {0.5, 1.0, 7.0}) {
    for (double rho : {0.1, 0.5, 0.9}) {
      MatrixXcd sigma = s2 * MatrixXcd::Identity(4, 4);
      double gamma = solve_gamma(sigma, rho);
      CHECK(gamma == doctest::Approx(s2).epsilon(1e-12));
    }
  }
}

TEST_CASE("gamma solver matches a scalar bisection oracle for diag(1,2)") {
  MatrixXcd sigma = Eigen::Vector2d(1.0, 2.0).asDiagonal().toDenseMatrix()
                        .cast<std::complex<double>>();
  const double rho = 0.5;
  // oracle: bisect 0.5 [1/(0.5 g + 0.5) + 2/(0.5 g + 1)] = 1 directly
  auto f = [&](double g) {
    return 0.5 * (1.0 / (0.5 * g + 0.5) + 2.0 / (0.5 * g + 1.0)) - 1.0;
  };
  double lo = 1e-9, hi = 100.0;
  while (hi - lo > 1e-13) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(solve_gamma(sigma, rho) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("gamma for the reference covariance satisfies its equation") {
  MatrixXcd sigma = build_covariance(reference_scenario());
  double gamma = solve_gamma(sigma, 0.65);
  CHECK(gamma_trace_residual(sigma, 0.65, gamma) <= 1e-10);
  // regression fixture
  CHECK(gamma == doctest::Approx(11.5906148347).epsilon(1e-6));
}

TEST_CASE("alpha formula") {
  CHECK(compute_alpha(0.5, 1.0, 0.04) == doctest::Approx(0.98).epsilon(1e-14));
  CHECK(compute_alpha(0.5, 2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  double prev = 0.0;
  for (double rho : {0.9, 0.99, 0.999}) {
    double a = compute_alpha(rho, 1.0, 0.04);
    CHECK(a > prev);
    prev = a;
  }
  CHECK_THROWS_AS(compute_alpha(1.0, 1.0, 0.04), DegenerateRho);
  CHECK_THROWS_AS(compute_alpha(0.1, 1.0, 2.0), InvalidRegime);
}

TEST_CASE("delta solver matches the closed-form quadratic for Sigma = I") {
  const int N = 4;
  for (int n : {20, 100}) {
    for (double alpha : {0.5, 2.0}) {
      MatrixXcd sigma = MatrixXcd::Identity(N, N);
      double d = solve_delta(sigma, alpha, n, 1e-12);
      CHECK(d == doctest::Approx(delta_quadratic_root(alpha, double(N) / n))
                     .epsilon(1e-10));
    }
  }
}

TEST_CASE("delta shrinks like (N/n)/alpha for huge loading") {
  MatrixXcd sigma = MatrixXcd::Identity(4, 4);
  double d = solve_delta(sigma, 1e6, 100);
  CHECK(d == doctest::Approx(0.04 / 1e6).epsilon(1e-3));
  CHECK(d == doctest::Approx(delta_quadratic_root(1e6, 0.04)).epsilon(1e-10));
}

TEST_CASE("delta for the reference covariance satisfies its fixed point") {
  MatrixXcd sigma = build_covariance(reference_scenario());
  double gamma = solve_gamma(sigma, 0.65);
  double alpha = compute_alpha(0.65, gamma, 4.0 / 40.0);
  double d = solve_delta(sigma, alpha, 40);
  MatrixXcd m = sigma / (1.0 + d) + alpha * MatrixXcd::Identity(4, 4);
  double mapped = (sigma * m.inverse()).trace().real() / 40.0;
  CHECK(std::abs(d - mapped) <= 1e-10);
}

TEST_CASE("equivalent loaded model: law of large numbers and floor") {
  MatrixXcd root = MatrixXcd::Identity(2, 2);
  MatrixXcd st = gaussian_equivalent_s_tilde(root, 1.0, 1000000, 3);
  CHECK((st - 2.0 * MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.01);

  MatrixXcd sigma = build_covariance(reference_scenario());
  MatrixXcd root4 = hermitian_sqrt(sigma);
  MatrixXcd draw = gaussian_equivalent_s_tilde(root4, 0.7, 10, 5);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(draw, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= 0.7 - 1e-12);
  MatrixXcd again = gaussian_equivalent_s_tilde(root4, 0.7, 10, 5);
  CHECK((draw - again).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Sigma_0 equals the identity for scaled identity inputs") {
  for (double c : {0.1, 1.0, 10.0}) {
    MatrixXcd sigma = c * MatrixXcd::Identity(4, 4);
    for (double rho : {0.3, 0.65}) {
      MatrixXcd s0 = solve_sigma0(sigma, rho, 1e-10);
      CHECK((s0 - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("Sigma_0 at rho = 1 is the identity") {
  MatrixXcd sigma = build_covariance(reference_scenario());
  MatrixXcd s0 = solve_sigma0(sigma, 1.0);
  CHECK((s0 - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Sigma_0 quadrature matches a Monte Carlo estimate of Eq-style expectation") {
  // independent oracle: estimate E[x x^* / (x^* Sigma_0^{-1} x)] by direct
  // Gaussian sampling and compare entrywise within 3 standard errors
  MatrixXcd sigma = build_covariance(reference_scenario());
  const double rho = 0.65;
  MatrixXcd sigma0 = solve_sigma0(sigma, rho, 1e-10);
  MatrixXcd root = hermitian_sqrt(sigma);
  Eigen::LDLT<MatrixXcd> ldlt(sigma0);
  const int N = 4, n_draws = 200000;
  MatrixXcd mean = MatrixXcd::Zero(N, N);
  MatrixXd var_re = MatrixXd::Zero(N, N), var_im = MatrixXd::Zero(N, N);
  for (int i = 0; i < n_draws; ++i) {
    auto gen = substream(77, 2, static_cast<std::uint64_t>(i));
    VectorXcd x = root * complex_gaussian(N, gen);
    double quad = x.dot(ldlt.solve(x)).real();
    MatrixXcd term = (x * x.adjoint()) / quad;
    mean += term;
    var_re += term.real().cwiseAbs2();
    var_im += term.imag().cwiseAbs2();
  }
  mean /= n_draws;
  MatrixXcd predicted = N * (1.0 - rho) * mean + rho * MatrixXcd::Identity(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      double se_re = std::sqrt((var_re(i, j) / n_draws -
                                mean(i, j).real() * mean(i, j).real()) /
                               n_draws) * N * (1.0 - rho);
      double se_im = std::sqrt((var_im(i, j) / n_draws -
                                mean(i, j).imag() * mean(i, j).imag()) /
                               n_draws) * N * (1.0 - rho);
      CHECK(std::abs(predicted(i, j).real() - sigma0(i, j).real()) <=
            3.0 * se_re + 1e-12);
      CHECK(std::abs(predicted(i, j).imag() - sigma0(i, j).imag()) <=
            3.0 * se_im + 1e-12);
    }
  }
}

TEST_CASE("M1/M2 vanish at rho = 1") {
  Scenario s = reference_scenario();
  MatrixXcd sigma0 = solve_sigma0(build_covariance(s), 1.0);
  M1M2 m = estimate_m1_m2(s, 1.0, 50, 20, 1, sigma0);
  CHECK(m.m1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.m2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("estimated M1 is Hermitian PSD and M2 symmetric") {
  Scenario s = reference_scenario();
  MatrixXcd sigma0 = solve_sigma0(build_covariance(s), 0.65, 1e-10);
  M1M2 m = estimate_m1_m2(s, 0.65, 300, 180, 1, sigma0);
  CHECK((m.m1 - m.m1.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((m.m2 - m.m2.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m.m1, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * m.m1.trace().real());
}

TEST_CASE("Xi assembly block arithmetic") {
  const int k = 4;
  MatrixXcd eye = MatrixXcd::Identity(k, k);
  MatrixXcd zero = MatrixXcd::Zero(k, k);
  MatrixXd xi = assemble_xi(eye, zero);
  CHECK((xi - 0.5 * MatrixXd::Identity(2 * k, 2 * k)).cwiseAbs().maxCoeff() <=
        1e-15);
  CHECK(assemble_xi(zero, zero).cwiseAbs().maxCoeff() == 0.0);

  auto gen = substream(31, 0, 0);
  MatrixXd s = rtmvdr::testing::random_pd(k, gen).real();
  s = ((s + s.transpose()) / 2.0).eval();
  MatrixXcd sc = s.cast<std::complex<double>>();
  MatrixXd xi2 = assemble_xi(sc, sc);
  CHECK((xi2.topLeftCorner(k, k) - s).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(xi2.bottomRightCorner(k, k).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(xi2.topRightCorner(k, k).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(assemble_xi(eye, MatrixXcd::Zero(3, 3)), DimensionMismatch);
}

TEST_CASE("Xi from estimated moments is symmetric PSD") {
  Scenario s = reference_scenario();
  MatrixXcd sigma0 = solve_sigma0(build_covariance(s), 0.65, 1e-10);
  M1M2 m = estimate_m1_m2(s, 0.65, 300, 180, 2, sigma0);
  MatrixXd xi = assemble_xi(m.m1, m.m2);
  CHECK((xi - xi.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(xi, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-8 * xi.trace());
}

TEST_CASE("c vector is the SNR directional derivative at Sigma_0") {
  MatrixXcd sigma = build_covariance(reference_scenario());
  MatrixXcd sigma0 = solve_sigma0(sigma, 0.65, 1e-10);
  VectorXcd s0 = steering_vector(0.0, 4);
  VectorXcd c = compute_c_vector(sigma, sigma0, s0);
  double base = output_snr(sigma0, sigma, s0);

  auto gen = substream(41, 0, 0);
  for (int dir = 0; dir < 20; ++dir) {
    MatrixXcd e = rtmvdr::testing::random_pd(4, gen);
    e = ((e + e.adjoint()) / 2.0 - MatrixXcd::Identity(4, 4) *
         (e.trace() / 8.0)).eval();  // Hermitian, mixed-sign
    e *= 1e-6 / e.cwiseAbs().maxCoeff();
    double bumped = output_snr(sigma0 + e, sigma, s0);
    Eigen::Map<const VectorXcd> vec_e(e.data(), 16);
    double predicted = (c.adjoint() * vec_e).value().real();
    CHECK(std::abs((bumped - base) - predicted) <=
          1e-3 * std::abs(predicted) + 1e-11);
  }
}

TEST_CASE("c vector vanishes when Sigma_0 equals Sigma") {
  // the SNR functional is maximized at C = Sigma, so the gradient is zero;
  // each of the three displayed terms equals the same rank-one row there
  VectorXcd s0 = VectorXcd::Ones(2);
  MatrixXcd eye = MatrixXcd::Identity(2, 2);
  VectorXcd c = compute_c_vector(eye, eye, s0);
  CHECK(c.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("c vector is degree-2 homogeneous in the steering vector") {
  MatrixXcd sigma = build_covariance(reference_scenario());
  MatrixXcd sigma0 = solve_sigma0(sigma, 0.65, 1e-10);
  VectorXcd s0 = steering_vector(0.0, 4);
  VectorXcd c1 = compute_c_vector(sigma, sigma0, s0);
  VectorXcd c2 = compute_c_vector(sigma, sigma0, 2.0 * s0);
  CHECK((c2 - 4.0 * c1).cwiseAbs().maxCoeff() <=
        1e-10 * c1.cwiseAbs().maxCoeff());
}

TEST_CASE("delta-method standard deviation") {
  const int k = 16;
  VectorXcd c = VectorXcd::Ones(k);
  CHECK(delta_method_sigma_n(c, MatrixXd::Zero(2 * k, 2 * k)) == 0.0);
  CHECK(delta_method_sigma_n(c, MatrixXd::Identity(2 * k, 2 * k)) ==
        doctest::Approx(4.0).epsilon(1e-14));  // sqrt(N^2) = N
  CHECK_THROWS_AS(
      delta_method_sigma_n(c, -MatrixXd::Identity(2 * k, 2 * k)),
      NegativeVariance);
  // rounding-level negative variance (above the -1e-8 guard) clamps to zero
  CHECK(delta_method_sigma_n(c, -1e-10 * MatrixXd::Identity(2 * k, 2 * k)) ==
        0.0);
}

TEST_CASE("snr0 agrees with the beamformer-module functional") {
  MatrixXcd sigma = build_covariance(reference_scenario());
  MatrixXcd sigma0 = solve_sigma0(sigma, 0.65, 1e-10);
  VectorXcd s0 = steering_vector(0.0, 4);
  CHECK(snr0(sigma, sigma0, s0) ==
        doctest::Approx(output_snr(sigma0, sigma, s0)).epsilon(1e-12));
  CHECK(snr0(MatrixXcd::Identity(4, 4), MatrixXcd::Identity(4, 4),
             VectorXcd::Ones(4)) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("equivalent-model center/scale is reproducible across seeds") {
  Scenario s = white_scenario(4);
  LargeNnParams a = large_nn_center_scale(s, 0.5, 100, 10000, 1);
  LargeNnParams b = large_nn_center_scale(s, 0.5, 100, 10000, 2);
  CHECK(a.scale > 0.0);
  CHECK(b.scale > 0.0);
  CHECK(std::abs(a.center - b.center) < 0.01 * std::abs(a.center));
}

TEST_CASE("rho = 1 pipeline is fully degenerate") {
  Scenario s = reference_scenario();
  LargeNParams p = build_large_n_params(s, 1.0, 1);
  CHECK(p.sigma_n == 0.0);
  CHECK(p.xi.cwiseAbs().maxCoeff() == 0.0);
  // the estimated SNR itself is deterministic: C_hat = I exactly
  SnapshotBatch batch = sample_snapshots(s, 30, 9);
  RteEstimate est = solve_rte(batch, 1.0);
  CHECK((est.matrix - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}
