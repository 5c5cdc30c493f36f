#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "airysim/continuum.hpp"
#include "airysim/montecarlo.hpp"

namespace airy {

/// Sample mean, variance and skewness with standard errors (variance error
/// from the fourth central moment, skewness error sqrt(6/n)), compared
/// against a Gaussian target.
struct GaussianMomentCheck {
  std::uint64_t n = 0;
  double mean = 0.0, mean_se = 0.0;
  double variance = 0.0, variance_se = 0.0;
  double skewness = 0.0, skewness_se = 0.0;
  double target_mean = 0.0;
  double target_variance = 0.0;

  double mean_z() const;
  double variance_z() const;
  double skewness_z() const;
  bool within(double k) const;
};

/// Moment check of a sample against a Gaussian target.
GaussianMomentCheck gaussian_moments(const std::vector<double>& xs, double target_mean, double target_variance);

/// Bessel route: samples of (1/2) int (1-t)/b dt - int b dt for Bessel(3)
/// bridges b from alpha/2 to 0 on [0, 1]; target N(-alpha/4, 1/12).
GaussianMomentCheck conditional_law_bessel_route(double alpha, std::uint64_t n_samples, std::size_t n_steps,
                                                 BesselMethod method, const ChunkPlan& plan);

/// Path route: reflected bridges on [0, 1] with L0 within alpha +- half_width;
/// statistic int r - int L^2 / 2. The targets account for the bin:
/// mean -E[L0 | bin] / 4 and variance 1/12 + Var(L0 | bin) / 16, both
/// evaluated on the accepted sample.
GaussianMomentCheck conditional_law_path_route(double alpha, double half_width, std::uint64_t n_paths,
                                               std::size_t n_steps, double bandwidth, const ChunkPlan& plan);

/// Kolmogorov-Smirnov distances.
double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct KsCheck {
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t n = 0;
  bool passed() const { return statistic < threshold; }
};

/// Law of Y_k / sqrt(k) for the lazy walk from 0 against |N(0, 1)|.
KsCheck lazy_endpoint_ks(std::size_t k, std::uint64_t n_samples, const ChunkPlan& plan, double threshold = 0.01);

/// Law of H(Y) / sqrt(k) for the lazy walk from 0 against sup(-B)_+ over
/// [0, 1], i.e. half the local time at zero of reflected BM. The continuum
/// sample uses the exact-in-law minimum of the Brownian interpolant on
/// n_steps_continuum grid steps.
KsCheck horizontal_vs_local_time_ks(std::size_t k, std::uint64_t n_samples, std::size_t n_steps_continuum,
                                    const ChunkPlan& plan, double threshold = 0.015);

}  // namespace airy
