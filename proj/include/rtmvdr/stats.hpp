#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "rtmvdr/errors.hpp"

namespace rtmvdr {

inline double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

/// Equal-width histogram normalized to unit integral.
struct Histogram {
  std::vector<double> edges;      // size bins + 1
  std::vector<double> density;    // size bins; >= 0, integrates to 1

  int bins() const { return static_cast<int>(density.size()); }
  double width(int i) const { return edges[i + 1] - edges[i]; }
  double midpoint(int i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

/// Sorted samples plus a histogram density view.
struct EmpiricalDistribution {
  std::vector<double> samples;  // ascending
  Histogram histogram;
};

namespace detail {

inline void require_nonempty(const std::vector<double>& v) {
  if (v.empty()) throw EmptySamples("need at least one sample");
}

/// Freedman-Diaconis bin count, clamped to [8, 512].
inline int fd_bin_count(const std::vector<double>& sorted) {
  const auto n = sorted.size();
  if (n < 2) return 8;
  double q1 = sorted[n / 4];
  double q3 = sorted[(3 * n) / 4];
  double iqr = q3 - q1;
  double range = sorted.back() - sorted.front();
  if (iqr <= 0.0 || range <= 0.0) return 8;
  double h = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  int bins = static_cast<int>(std::ceil(range / h));
  return std::clamp(bins, 8, 512);
}

}  // namespace detail

/// Histogram over [min, max] of the samples; bins == 0 selects the
/// Freedman-Diaconis rule.
inline Histogram make_histogram(const std::vector<double>& sorted, int bins = 0) {
  detail::require_nonempty(sorted);
  if (bins <= 0) bins = detail::fd_bin_count(sorted);
  double lo = sorted.front(), hi = sorted.back();
  if (hi <= lo) hi = lo + 1.0;  // degenerate sample; one-unit support
  Histogram h;
  h.edges.resize(bins + 1);
  h.density.assign(bins, 0.0);
  double w = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + w * i;
  for (double x : sorted) {
    int i = std::min(bins - 1, static_cast<int>((x - lo) / w));
    h.density[std::max(0, i)] += 1.0;
  }
  double norm = static_cast<double>(sorted.size()) * w;
  for (double& d : h.density) d /= norm;
  return h;
}

inline EmpiricalDistribution make_empirical(std::vector<double> samples,
                                            int bins = 0) {
  detail::require_nonempty(samples);
  std::sort(samples.begin(), samples.end());
  EmpiricalDistribution e;
  e.histogram = make_histogram(samples, bins);
  e.samples = std::move(samples);
  return e;
}

/// Right-continuous ECDF value (#samples <= x) / n.
inline double ecdf(const std::vector<double>& sorted, double x) {
  detail::require_nonempty(sorted);
  auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / sorted.size();
}

/// Exact one-sample KS statistic against a continuous reference CDF,
/// via the order statistics: max over i of the two one-sided gaps.
inline double ks_statistic(const EmpiricalDistribution& emp,
                           const std::function<double(double)>& ref_cdf) {
  detail::require_nonempty(emp.samples);
  const auto n = emp.samples.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = ref_cdf(emp.samples[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

/// Two-sample KS statistic over the merged sample grid.
inline double two_sample_ks(const EmpiricalDistribution& a,
                            const EmpiricalDistribution& b) {
  detail::require_nonempty(a.samples);
  detail::require_nonempty(b.samples);
  const auto& xa = a.samples;
  const auto& xb = b.samples;
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xa.size() || j < xb.size()) {
    double x = (j >= xb.size() || (i < xa.size() && xa[i] <= xb[j])) ? xa[i] : xb[j];
    while (i < xa.size() && xa[i] <= x) ++i;
    while (j < xb.size() && xb[j] <= x) ++j;
    double fa = static_cast<double>(i) / xa.size();
    double fb = static_cast<double>(j) / xb.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

enum class Divergence { Hellinger, TotalVariation, SymmetricKL };

/// f-divergence D_f(P || Q) = sum_bins f(p/q) q w with the empirical density p
/// binwise and the reference q at bin midpoints.
///   Hellinger: f(t) = (sqrt(t) - 1)^2
///   TV:        f(t) = |t - 1| / 2
///   sym KL:    t log t in both orientations, summed; p = 0 bins contribute 0
/// Errors out when more than 5% of empirical mass falls where the reference
/// density vanishes.
inline double f_divergence(const Histogram& emp_pdf,
                           const std::function<double(double)>& ref_pdf,
                           Divergence kind) {
  double bad_mass = 0.0;
  for (int i = 0; i < emp_pdf.bins(); ++i) {
    if (ref_pdf(emp_pdf.midpoint(i)) < 1e-30)
      bad_mass += emp_pdf.density[i] * emp_pdf.width(i);
  }
  if (bad_mass > 0.05)
    throw SupportMismatch("empirical mass outside reference support");

  double acc = 0.0;
  for (int i = 0; i < emp_pdf.bins(); ++i) {
    double w = emp_pdf.width(i);
    double p = emp_pdf.density[i];
    double q = ref_pdf(emp_pdf.midpoint(i));
    if (q < 1e-30) continue;
    switch (kind) {
      case Divergence::Hellinger: {
        double s = std::sqrt(p / q) - 1.0;
        acc += s * s * q * w;
        break;
      }
      case Divergence::TotalVariation:
        acc += 0.5 * std::abs(p - q) * w;
        break;
      case Divergence::SymmetricKL:
        if (p > 0.0) acc += (p * std::log(p / q) + q * std::log(q / p)) * w;
        break;
    }
  }
  return acc;
}

struct DivergenceReport {
  double ks = 0.0;
  double hellinger = 0.0;
  double total_variation = 0.0;
  double sym_kl = 0.0;
};

/// All section-IV distances of an empirical sample against a continuous
/// reference law given by its CDF and PDF.
inline DivergenceReport divergence_report(
    const EmpiricalDistribution& emp,
    const std::function<double(double)>& ref_cdf,
    const std::function<double(double)>& ref_pdf) {
  DivergenceReport r;
  r.ks = ks_statistic(emp, ref_cdf);
  r.hellinger = f_divergence(emp.histogram, ref_pdf, Divergence::Hellinger);
  r.total_variation = f_divergence(emp.histogram, ref_pdf, Divergence::TotalVariation);
  r.sym_kl = f_divergence(emp.histogram, ref_pdf, Divergence::SymmetricKL);
  return r;
}

}  // namespace rtmvdr
