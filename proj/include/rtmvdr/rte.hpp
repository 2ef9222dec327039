#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "rtmvdr/errors.hpp"
#include "rtmvdr/scenario.hpp"

namespace rtmvdr {

struct RteEstimate {
  MatrixXcd matrix;  // converged C_hat(rho), Hermitian PD
  double rho = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative fixed-point residual, max-norm
};

namespace detail {

/// One application of the RTE fixed-point map
///   F(C) = (1-rho) (1/n) sum_i x_i x_i^* / ((1/N) x_i^* C^{-1} x_i) + rho I.
inline MatrixXcd rte_map(const MatrixXcd& c, const MatrixXcd& x, double rho) {
  const int N = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  Eigen::LLT<MatrixXcd> llt(c);
  if (llt.info() != Eigen::Success)
    throw SingularMatrix("RTE iterate is not positive definite");
  // x^* C^{-1} x = ||L^{-1} x||^2 with C = L L^*
  MatrixXcd y = llt.matrixL().solve(x);
  VectorXd quad = y.colwise().squaredNorm();
  VectorXd w = (1.0 - rho) / n * (static_cast<double>(N) * quad.cwiseInverse());
  MatrixXcd f = (x * w.asDiagonal()) * x.adjoint();
  f.diagonal().array() += rho;
  return (f + f.adjoint()) / 2.0;
}

inline double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace detail

inline void check_rho(double rho, int n_samples, int n_sensors) {
  double lo = std::max(0.0, 1.0 - static_cast<double>(n_samples) / n_sensors);
  if (!(rho > lo && rho <= 1.0))
    throw InvalidRho("rho must lie in (max(0, 1 - n/N), 1]");
}

/// Relative fixed-point residual ||C - F(C)||_max / ||C||_max, evaluated with
/// a fresh factorization of C.
inline double rte_residual(const MatrixXcd& c, const SnapshotBatch& batch,
                           double rho) {
  MatrixXcd f = detail::rte_map(c, batch.samples, rho);
  return detail::max_abs(c - f) / detail::max_abs(c);
}

/// Picard iteration of the RTE fixed point from C = I.
inline RteEstimate solve_rte(const SnapshotBatch& batch, double rho,
                             double tol = 1e-10, int max_iter = 500) {
  const int N = batch.n_sensors();
  const int n = batch.n_samples();
  check_rho(rho, n, N);
  for (int i = 0; i < n; ++i)
    if (batch.samples.col(i).norm() == 0.0)
      throw DegenerateSnapshot("snapshot " + std::to_string(i) + " is zero");

  RteEstimate est;
  est.rho = rho;
  est.matrix = MatrixXcd::Identity(N, N);
  if (rho == 1.0) {
    est.iterations = 1;
    est.residual = 0.0;
    return est;
  }
  for (int it = 1; it <= max_iter; ++it) {
    MatrixXcd next = detail::rte_map(est.matrix, batch.samples, rho);
    double res = detail::max_abs(est.matrix - next) / detail::max_abs(est.matrix);
    est.iterations = it;
    est.residual = res;
    // residual is measured on the iterate we return, so the contract
    // ||C - F(C)|| / ||C|| <= tol holds for est.matrix itself
    if (res <= tol) return est;
    est.matrix = next;
  }
  throw NonConvergence("RTE did not reach tol " + std::to_string(tol) +
                       " in " + std::to_string(max_iter) + " iterations");
}

}  // namespace rtmvdr
