#include "airysim/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "airysim/error.hpp"
#include "airysim/lattice.hpp"

namespace airy {

double GaussianMomentCheck::mean_z() const {
  return mean_se > 0 ? (mean - target_mean) / mean_se : 0.0;
}
double GaussianMomentCheck::variance_z() const {
  return variance_se > 0 ? (variance - target_variance) / variance_se : 0.0;
}
double GaussianMomentCheck::skewness_z() const { return skewness_se > 0 ? skewness / skewness_se : 0.0; }
bool GaussianMomentCheck::within(double k) const {
  return std::fabs(mean_z()) <= k && std::fabs(variance_z()) <= k && std::fabs(skewness_z()) <= k;
}

GaussianMomentCheck gaussian_moments(const std::vector<double>& xs, double target_mean, double target_variance) {
  require(xs.size() >= 4, ErrorCode::Domain, "need at least four samples");
  GaussianMomentCheck c;
  c.n = xs.size();
  c.target_mean = target_mean;
  c.target_variance = target_variance;
  const double n = static_cast<double>(xs.size());
  CompensatedSum s1;
  for (double x : xs) s1.add(x);
  const double m = s1.value() / n;
  CompensatedSum s2, s3, s4;
  for (double x : xs) {
    const double d = x - m, d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  const double m2 = s2.value() / n, m3 = s3.value() / n, m4 = s4.value() / n;
  c.mean = m;
  c.variance = m2 * n / (n - 1.0);
  c.mean_se = std::sqrt(c.variance / n);
  c.variance_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  c.skewness = m3 / std::pow(m2, 1.5);
  c.skewness_se = std::sqrt(6.0 / n);
  return c;
}

namespace {

struct SampleVec {
  std::vector<double> xs;
  void merge(const SampleVec& o) { xs.insert(xs.end(), o.xs.begin(), o.xs.end()); }
};

struct PairVec {
  std::vector<double> a, b;
  void merge(const PairVec& o) {
    a.insert(a.end(), o.a.begin(), o.a.end());
    b.insert(b.end(), o.b.begin(), o.b.end());
  }
};

}  // namespace

GaussianMomentCheck conditional_law_bessel_route(double alpha, std::uint64_t n_samples, std::size_t n_steps,
                                                 BesselMethod method, const ChunkPlan& plan) {
  require(alpha > 0 && std::isfinite(alpha), ErrorCode::Domain, "alpha must be positive");
  const auto acc = mc_reduce<SampleVec>(plan, n_samples, [] { return SampleVec{}; }, [&](SampleVec& v, RngStream& s) {
    const BesselBridge bb = sample_bessel3_bridge(alpha / 2.0, n_steps, s, method);
    v.xs.push_back(0.5 * bessel_inverse_integral(bb.b) - time_integral(bb.b));
  });
  return gaussian_moments(acc.xs, -alpha / 4.0, 1.0 / 12.0);
}

GaussianMomentCheck conditional_law_path_route(double alpha, double half_width, std::uint64_t n_paths,
                                               std::size_t n_steps, double bandwidth, const ChunkPlan& plan) {
  require(alpha > 0 && half_width > 0, ErrorCode::Domain, "alpha and half_width must be positive");
  const auto acc = mc_reduce<PairVec>(plan, n_paths, [] { return PairVec{}; }, [&](PairVec& v, RngStream& s) {
    const AbsolutePath r = sample_reflected_bridge_with_local_time(1.0, n_steps, s);
    if (std::fabs(r.L0 - alpha) > half_width) return;
    const LocalTimeProfile prof = local_time_profile(r.path, bandwidth);
    v.a.push_back(time_integral(r.path) - 0.5 * prof.squared_integral());
    v.b.push_back(r.L0);
  });
  require(acc.a.size() >= 4, ErrorCode::Numeric, "too few paths in the local-time bin");
  const GaussianMomentCheck alpha_stats = gaussian_moments(acc.b, 0.0, 0.0);
  return gaussian_moments(acc.a, -alpha_stats.mean / 4.0, 1.0 / 12.0 + alpha_stats.variance / 16.0);
}

double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  require(!xs.empty(), ErrorCode::Domain, "empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;  // ties form one ECDF jump
    const double f = cdf(xs[i]);
    d = std::max({d, std::fabs(static_cast<double>(j) / n - f), std::fabs(f - static_cast<double>(i) / n)});
    i = j;
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::Domain, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

KsCheck lazy_endpoint_ks(std::size_t k, std::uint64_t n_samples, const ChunkPlan& plan, double threshold) {
  require(k >= 1, ErrorCode::Domain, "k must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  const auto acc = mc_reduce<SampleVec>(plan, n_samples, [] { return SampleVec{}; }, [&](SampleVec& v, RngStream& s) {
    const LatticePath p = sample_walk(WalkKind::Lazy, k, 0, s);
    std::int64_t end = p.start;
    for (auto st : p.steps) end += st;
    v.xs.push_back(static_cast<double>(end) * scale);
  });
  KsCheck out;
  out.n = acc.xs.size();
  out.threshold = threshold;
  out.statistic = ks_one_sample(acc.xs, [](double x) { return x <= 0 ? 0.0 : std::erf(x / std::sqrt(2.0)); });
  return out;
}

KsCheck horizontal_vs_local_time_ks(std::size_t k, std::uint64_t n_samples, std::size_t n_steps_continuum,
                                    const ChunkPlan& plan, double threshold) {
  require(k >= 1 && n_steps_continuum >= 1, ErrorCode::Domain, "step counts must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  const auto acc = mc_reduce<PairVec>(plan, n_samples, [] { return PairVec{}; }, [&](PairVec& v, RngStream& s) {
    const LatticePath p = sample_walk(WalkKind::Lazy, k, 0, s);
    v.a.push_back(static_cast<double>(horizontal_count(p)) * scale);
    const GridPath b = sample_path(PathKind::BrownianMotion, 0.0, std::nullopt, 1.0, n_steps_continuum, s);
    v.b.push_back(std::max(0.0, -sample_path_minimum(b, s)));
  });
  KsCheck out;
  out.n = acc.a.size();
  out.threshold = threshold;
  out.statistic = ks_two_sample(acc.a, acc.b);
  return out;
}

}  // namespace airy
