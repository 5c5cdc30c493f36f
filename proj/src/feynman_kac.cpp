#include "airysim/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "airysim/closed_forms.hpp"
#include "airysim/error.hpp"

namespace airy {

void FkParams::validate() const {
  require(beta > 0 && std::isfinite(beta), ErrorCode::Domain, "beta must be positive");
  require(std::isfinite(w), ErrorCode::Domain, "w must be finite");
  require(T > 0 && std::isfinite(T), ErrorCode::Domain, "T must be positive");
  require(n_steps >= 1, ErrorCode::Domain, "n_steps must be >= 1");
  require(n_paths >= 1, ErrorCode::Domain, "n_paths must be >= 1");
  require(std::isfinite(delta_a), ErrorCode::Domain, "delta_a must be finite");
  require(n_chunks >= 1, ErrorCode::Usage, "n_chunks must be >= 1");
}

double FkParams::bandwidth() const {
  return delta_a > 0 ? delta_a : std::sqrt(T / static_cast<double>(n_steps));
}

ChunkPlan FkParams::plan(const RngStream& s) const {
  return ChunkPlan{s.master_seed(), s.stream_id(), n_chunks, workers};
}

NoiseField NoiseField::generate(double delta_a, std::uint64_t seed, std::uint64_t stream_id) {
  require(delta_a > 0 && std::isfinite(delta_a), ErrorCode::Domain, "noise bin width must be positive");
  NoiseField f;
  f.kind_ = Kind::Generated;
  f.delta_a_ = delta_a;
  f.seed_ = seed;
  f.stream_ = stream_id;
  return f;
}

NoiseField NoiseField::explicit_increments(double delta_a, std::vector<double> increments) {
  require(delta_a > 0 && std::isfinite(delta_a), ErrorCode::Domain, "noise bin width must be positive");
  NoiseField f;
  f.kind_ = Kind::Explicit;
  f.delta_a_ = delta_a;
  f.increments_ = std::move(increments);
  return f;
}

NoiseField NoiseField::zero(double delta_a) {
  require(delta_a > 0 && std::isfinite(delta_a), ErrorCode::Domain, "noise bin width must be positive");
  NoiseField f;
  f.kind_ = Kind::Zero;
  f.delta_a_ = delta_a;
  return f;
}

double NoiseField::increment(std::size_t j) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Explicit:
      require(j < increments_.size(), ErrorCode::Domain, "level beyond the explicit noise field");
      return increments_[j];
    case Kind::Generated: {
      const std::uint64_t jj = j;
      const auto r = philox4x32({static_cast<std::uint32_t>(jj), static_cast<std::uint32_t>(jj >> 32),
                                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                                {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
      const std::uint64_t bits = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
      const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
      return std::sqrt(delta_a_) * normal_quantile(u);
    }
  }
  return 0.0;
}

double NoiseField::integrate(const LocalTimeProfile& profile) const {
  require(std::fabs(profile.bandwidth - delta_a_) <= 1e-12 * delta_a_, ErrorCode::DimMismatch,
          "profile and noise use different level bins");
  if (kind_ == Kind::Zero) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < profile.masses.size(); ++j)
    if (profile.masses[j] != 0.0) acc += profile.masses[j] * increment(j);
  return acc;
}

GridPath NoiseField::path(std::size_t n) const {
  GridPath g;
  g.dt = delta_a_;
  g.values.resize(n + 1);
  g.values[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) g.values[j + 1] = g.values[j] + increment(j);
  return g;
}

double log_path_weight(const AbsolutePath& path, const FkParams& p, const NoiseField* noise) {
  const LocalTimeProfile prof = local_time_profile(path.path, p.bandwidth());
  double level;
  if (p.mode == FkMode::Annealed) {
    level = prof.squared_integral() / (2.0 * p.beta);
  } else {
    require(noise != nullptr, ErrorCode::Usage, "quenched mode needs a noise field");
    level = noise->integrate(prof) / std::sqrt(p.beta);
  }
  return -0.5 * time_integral(path.path) + level - 0.5 * p.w * path.L0;
}

namespace {

double checked_exp(double x) {
  const double v = std::exp(x);
  require(std::isfinite(v), ErrorCode::Numeric, "path weight overflow");
  return v;
}

void check_noise(const FkParams& p, const NoiseField* noise) {
  if (p.mode == FkMode::Quenched) {
    require(noise != nullptr, ErrorCode::Usage, "quenched mode needs a noise field");
    require(std::fabs(noise->bandwidth() - p.bandwidth()) <= 1e-12 * p.bandwidth(), ErrorCode::DimMismatch,
            "noise field bin width differs from delta_a");
  }
}

double free_kernel(double d, double T) {
  return std::exp(-d * d / (2.0 * T)) / std::sqrt(2.0 * std::numbers::pi * T);
}

}  // namespace

MCEstimate fk_apply(const TestFunction& f, double x, const FkParams& p, const NoiseField* noise, RngStream& s) {
  p.validate();
  require(x >= 0 && std::isfinite(x), ErrorCode::Domain, "x must be nonnegative");
  check_noise(p, noise);
  return mc_mean(p.plan(s), p.n_paths, [&](RngStream& rs) {
    const GridPath b = sample_path(PathKind::BrownianMotion, x, std::nullopt, p.T, p.n_steps, rs);
    const AbsolutePath r = absolute_with_local_time(b, rs);
    return checked_exp(log_path_weight(r, p, noise)) * f(r.path.values.back());
  });
}

MCEstimate fk_inner_product(const TestFunction& f, const TestFunction& g, const FkParams& p,
                            const NoiseField* noise, RngStream& s, double rate) {
  p.validate();
  require(rate > 0 && std::isfinite(rate), ErrorCode::Domain, "rate must be positive");
  check_noise(p, noise);
  return mc_mean(p.plan(s), p.n_paths, [&](RngStream& rs) {
    const double x = -std::log1p(-rs.uniform()) / rate;
    const double fx = f(x) * std::exp(rate * x) / rate;
    const GridPath b = sample_path(PathKind::BrownianMotion, x, std::nullopt, p.T, p.n_steps, rs);
    const AbsolutePath r = absolute_with_local_time(b, rs);
    return fx * checked_exp(log_path_weight(r, p, noise)) * g(r.path.values.back());
  });
}

namespace {

struct KernelAcc {
  RunningMoments weight;
  RunningMoments touch;
  void merge(const KernelAcc& o) {
    weight.merge(o.weight);
    touch.merge(o.touch);
  }
};

}  // namespace

KernelEstimate kernel_estimate(double x, double y, const FkParams& p, const NoiseField* noise, RngStream& s) {
  p.validate();
  require(x >= 0 && y >= 0 && std::isfinite(x) && std::isfinite(y), ErrorCode::Domain,
          "kernel arguments must be nonnegative");
  check_noise(p, noise);
  const auto acc = mc_reduce<KernelAcc>(
      p.plan(s), p.n_paths, [] { return KernelAcc{}; },
      [&](KernelAcc& a, RngStream& rs) {
        const GridPath b = sample_path(PathKind::Bridge, x, y, p.T, p.n_steps, rs);
        const AbsolutePath r = absolute_with_local_time(b, rs);
        const double factor = r.touched ? 2.0 : 1.0;
        a.weight.add(factor * checked_exp(log_path_weight(r, p, noise)));
        a.touch.add(r.touched ? 1.0 : 0.0);
      });
  const double pre = free_kernel(x - y, p.T);
  KernelEstimate out;
  out.kernel = MCEstimate{pre * acc.weight.mean, pre * acc.weight.std_error(), acc.weight.n, s.master_seed()};
  out.crossing = MCEstimate{acc.touch.mean, acc.touch.std_error(), acc.touch.n, s.master_seed()};
  out.crossing_expected = bridge_hit_zero_prob(x, y, p.T);
  return out;
}

MCEstimate expected_kernel_00(const FkParams& p, RngStream& s) {
  p.validate();
  const double sqrtT = std::sqrt(p.T);
  const double da_unit = p.bandwidth() / sqrtT;
  const double t32 = p.T * sqrtT;
  const double pre = std::sqrt(2.0 / (std::numbers::pi * p.T));
  MCEstimate e = mc_mean(p.plan(s), p.n_paths, [&](RngStream& rs) {
    const AbsolutePath r = sample_reflected_bridge_with_local_time(1.0, p.n_steps, rs);
    const LocalTimeProfile prof = local_time_profile(r.path, da_unit);
    const double expo = -0.5 * t32 * (time_integral(r.path) - prof.squared_integral() / p.beta) -
                        0.5 * sqrtT * p.w * r.L0;
    return checked_exp(expo);
  });
  e.mean *= pre;
  e.std_error *= pre;
  return e;
}

TraceEstimate trace_estimate(const FkParams& p, double x_max, std::size_t n_x, RngStream& s) {
  p.validate();
  require(x_max > 0 && std::isfinite(x_max), ErrorCode::Domain, "x_max must be positive");
  require(n_x >= 1, ErrorCode::Domain, "n_x must be >= 1");
  FkParams pa = p;
  pa.mode = FkMode::Annealed;
  TraceEstimate out;
  const double h = x_max / static_cast<double>(n_x);
  CompensatedSum sum;
  double var = 0.0;
  for (std::size_t i = 0; i <= n_x; ++i) {
    const double x = h * static_cast<double>(i);
    // Grid nodes shared by a refined grid reuse the same stream, so halving
    // h only adds new nodes.
    RngStream node(s.master_seed(), substream(s.stream_id(), static_cast<std::uint64_t>(std::llround(x * 1e6))));
    const MCEstimate k = kernel_estimate(x, x, pa, nullptr, node).kernel;
    const double wq = (i == 0 || i == n_x) ? 0.5 * h : h;
    sum.add(wq * k.mean);
    var += wq * wq * k.std_error * k.std_error;
    out.grid.push_back(x);
    out.diagonal.push_back(k);
  }
  out.trace = MCEstimate{sum.value(), std::sqrt(var), p.n_paths * (n_x + 1), s.master_seed()};
  out.tail = out.diagonal.back().mean * 2.0 / p.T;
  return out;
}

SemigroupResidual chapman_kolmogorov_residual(double x, double y, double T1, double T2, const FkParams& p,
                                              const NoiseField& noise, RngStream& s, double points_per_sd) {
  require(T1 > 0 && T2 > 0 && std::isfinite(T1) && std::isfinite(T2), ErrorCode::Domain,
          "T1 and T2 must be positive");
  require(points_per_sd > 0, ErrorCode::Domain, "points_per_sd must be positive");
  const double Tt = T1 + T2;
  FkParams p1 = p, p2 = p, p12 = p;
  p1.mode = p2.mode = p12.mode = FkMode::Quenched;
  p1.T = T1;
  p2.T = T2;
  p12.T = Tt;
  const auto split = [&](double Ti) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(p.n_steps) * Ti / Tt)));
  };
  p1.n_steps = split(T1);
  p2.n_steps = split(T2);
  // One level grid for all three kernels, the one the shared noise lives on.
  p1.delta_a = p2.delta_a = p12.delta_a =
      p.delta_a > 0 ? p.delta_a : std::sqrt(Tt / static_cast<double>(p.n_steps));
  p12.validate();

  // Peak and width of p_{T1}(x - z) p_{T2}(z - y) in z.
  const double zc = (x * T2 + y * T1) / Tt;
  const double sd = std::sqrt(T1 * T2 / Tt);
  const double half = 8.0 * sd;
  const double lo = std::max(0.0, zc - half);
  const double hi = zc + half;
  const double h = sd / points_per_sd;
  const auto n_int = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((hi - lo) / h)));
  const double hz = (hi - lo) / static_cast<double>(n_int);

  CompensatedSum comp;
  double var = 0.0;
  for (std::size_t i = 0; i <= n_int; ++i) {
    const double z = lo + hz * static_cast<double>(i);
    RngStream s1(s.master_seed(), substream(s.stream_id(), 2 * i + 1));
    RngStream s2(s.master_seed(), substream(s.stream_id(), 2 * i + 2));
    const MCEstimate k1 = kernel_estimate(x, z, p1, &noise, s1).kernel;
    const MCEstimate k2 = kernel_estimate(z, y, p2, &noise, s2).kernel;
    const double wq = (i == 0 || i == n_int) ? 0.5 * hz : hz;
    comp.add(wq * k1.mean * k2.mean);
    const double v1 = k1.std_error * k1.std_error, v2 = k2.std_error * k2.std_error;
    var += wq * wq * (k2.mean * k2.mean * v1 + k1.mean * k1.mean * v2 + v1 * v2);
  }
  RngStream s0(s.master_seed(), substream(s.stream_id(), 0));
  const MCEstimate direct = kernel_estimate(x, y, p12, &noise, s0).kernel;

  SemigroupResidual out;
  out.n_z = n_int + 1;
  out.composed = MCEstimate{comp.value(), std::sqrt(var), p.n_paths * 2 * (n_int + 1), s.master_seed()};
  out.direct = direct;
  out.residual = MCEstimate{out.composed.mean - direct.mean,
                            std::hypot(out.composed.std_error, direct.std_error), out.composed.n + direct.n,
                            s.master_seed()};
  return out;
}

}  // namespace airy
