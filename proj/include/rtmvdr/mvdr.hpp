#pragma once

#include <Eigen/Dense>

#include "rtmvdr/errors.hpp"
#include "rtmvdr/scenario.hpp"

namespace rtmvdr {

namespace detail {

inline Eigen::LDLT<MatrixXcd> factorize_pd(const MatrixXcd& c) {
  Eigen::LDLT<MatrixXcd> ldlt(c);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      !(ldlt.vectorD().real().minCoeff() > 0.0))
    throw SingularMatrix("matrix is not positive definite");
  return ldlt;
}

}  // namespace detail

struct BeamformerOutput {
  VectorXcd weights;  // distortionless: weights^* s0 = 1
  double snr = 0.0;   // linear
};

/// u = C^{-1} s0 / (s0^* C^{-1} s0).
inline VectorXcd mvdr_weights(const MatrixXcd& c, const VectorXcd& s0) {
  if (s0.norm() == 0.0) throw InvalidScenario("steering vector is zero");
  VectorXcd u = detail::factorize_pd(c).solve(s0);
  std::complex<double> denom = s0.dot(u);  // s0^* C^{-1} s0, real positive
  return u / denom;
}

/// Output SNR of the C-based MVDR filter under true covariance Sigma:
///   (s0^* C^{-1} s0)^2 / (s0^* C^{-1} Sigma C^{-1} s0).
inline double output_snr(const MatrixXcd& c, const MatrixXcd& sigma,
                         const VectorXcd& s0) {
  VectorXcd u = detail::factorize_pd(c).solve(s0);
  double num = s0.dot(u).real();
  double den = u.dot(sigma * u).real();
  return num * num / den;
}

/// Optimal SNR s0^* Sigma^{-1} s0; upper bound of output_snr for any C.
inline double oracle_snr(const MatrixXcd& sigma, const VectorXcd& s0) {
  return s0.dot(detail::factorize_pd(sigma).solve(s0)).real();
}

inline BeamformerOutput mvdr_beamformer(const MatrixXcd& c,
                                        const MatrixXcd& sigma,
                                        const VectorXcd& s0) {
  return {mvdr_weights(c, s0), output_snr(c, sigma, s0)};
}

}  // namespace rtmvdr
