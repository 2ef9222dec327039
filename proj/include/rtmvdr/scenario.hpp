#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rtmvdr/errors.hpp"
#include "rtmvdr/rng.hpp"

namespace rtmvdr {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Texture law of the compound-Gaussian noise; every draw is > 0.
struct TextureLaw {
  enum class Kind { Constant, InverseGamma, Exponential };

  Kind kind = Kind::Constant;
  double shape = 2.0;  // inverse-gamma only; scaled to unit mean

  double draw(std::mt19937_64& gen) const {
    switch (kind) {
      case Kind::Constant:
        return 1.0;
      case Kind::InverseGamma:
        // scale = shape - 1 gives E[tau] = 1; needs shape > 1
        return (shape - 1.0) / gamma_draw(shape, gen);
      case Kind::Exponential:
        return -std::log(uniform01(gen));
    }
    return 1.0;
  }

  static TextureLaw constant() { return {Kind::Constant, 0.0}; }
  static TextureLaw inverse_gamma(double shape) {
    if (shape <= 1.0) throw InvalidScenario("inverse-gamma shape must be > 1");
    return {Kind::InverseGamma, shape};
  }
  static TextureLaw exponential() { return {Kind::Exponential, 0.0}; }
};

struct Interferer {
  double spatial_freq = 0.0;  // in [-0.5, 0.5)
  double power = 1.0;         // linear
};

/// Array geometry + interference-plus-noise model; everything needed to build
/// the covariance and sample snapshots.
struct Scenario {
  int n_sensors = 1;
  double noise_floor = 1.0;  // linear
  std::vector<Interferer> interferers;
  double look_spatial_freq = 0.0;
  TextureLaw texture = TextureLaw::constant();

  void validate() const {
    if (n_sensors < 1) throw InvalidScenario("n_sensors must be >= 1");
    if (noise_floor <= 0.0) throw InvalidScenario("noise_floor must be > 0");
    for (const auto& itf : interferers)
      if (itf.power <= 0.0) throw InvalidScenario("interferer power must be > 0");
  }
};

/// ULA steering vector: entry k (0-based) is exp(j 2 pi k theta).
inline VectorXcd steering_vector(double spatial_freq, int n_sensors) {
  if (n_sensors < 1) throw InvalidScenario("n_sensors must be >= 1");
  VectorXcd a(n_sensors);
  for (int k = 0; k < n_sensors; ++k) {
    double phase = 2.0 * M_PI * k * spatial_freq;
    a(k) = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return a;
}

/// Half-wavelength ULA: theta = 0.5 sin(angle).
inline double physical_angle_to_spatial_freq(double angle_deg) {
  if (!(angle_deg >= -90.0 && angle_deg <= 90.0))
    throw InvalidScenario("angle must lie in [-90, 90] degrees");
  return 0.5 * std::sin(angle_deg * M_PI / 180.0);
}

/// Sigma_N = sigma0^2 I + sum_i sigma_i^2 a(theta_i) a(theta_i)^*.
inline MatrixXcd build_covariance(const Scenario& s) {
  s.validate();
  const int n = s.n_sensors;
  MatrixXcd sigma = s.noise_floor * MatrixXcd::Identity(n, n);
  for (const auto& itf : s.interferers) {
    VectorXcd a = steering_vector(itf.spatial_freq, n);
    sigma.noalias() += itf.power * (a * a.adjoint());
  }
  return (sigma + sigma.adjoint()) / 2.0;
}

/// Hermitian PSD square root via eigendecomposition.
inline MatrixXcd hermitian_sqrt(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  if (es.info() != Eigen::Success) throw SingularMatrix("eigendecomposition failed");
  VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// n compound-Gaussian snapshots; the underlying Gaussians and textures are
/// retained so texture invariance can be tested on identical w_i.
struct SnapshotBatch {
  MatrixXcd samples;   // N x n, column i is x_i
  VectorXd textures;   // n
  MatrixXcd gaussians; // N x n, column i is w_i

  int n_sensors() const { return static_cast<int>(samples.rows()); }
  int n_samples() const { return static_cast<int>(samples.cols()); }
};

/// x_i = sqrt(tau_i) Sigma^{1/2} w_i, deterministic per (seed, i).
inline SnapshotBatch sample_snapshots(const Scenario& s, int n,
                                      std::uint64_t seed) {
  if (n < 1) throw InvalidScenario("need n >= 1 snapshots");
  s.validate();
  const int N = s.n_sensors;
  MatrixXcd root = hermitian_sqrt(build_covariance(s));

  SnapshotBatch batch;
  batch.samples.resize(N, n);
  batch.textures.resize(n);
  batch.gaussians.resize(N, n);
  for (int i = 0; i < n; ++i) {
    auto gw = substream(seed, stream::kSnapshots, static_cast<std::uint64_t>(i));
    auto gt = substream(seed, stream::kTextures, static_cast<std::uint64_t>(i));
    VectorXcd w = complex_gaussian(N, gw);
    double tau = s.texture.draw(gt);
    batch.gaussians.col(i) = w;
    batch.textures(i) = tau;
    batch.samples.col(i) = std::sqrt(tau) * (root * w);
  }
  return batch;
}

}  // namespace rtmvdr
