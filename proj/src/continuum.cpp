#include "airysim/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "airysim/error.hpp"

namespace airy {

void GridPath::write_csv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << "t,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) os << dt * static_cast<double>(i) << ',' << values[i] << '\n';
  os.precision(old);
}

double LocalTimeProfile::total_time() const {
  double sum = 0.0, comp = 0.0;
  for (double m : masses) {  // Neumaier
    const double t = sum + m;
    comp += std::fabs(sum) >= std::fabs(m) ? (sum - t) + m : (m - t) + sum;
    sum = t;
  }
  return (sum + comp) * bandwidth;
}

double LocalTimeProfile::squared_integral() const {
  double acc = 0.0;
  for (double m : masses) acc += m * m;
  return acc * bandwidth;
}

LocalTimeProfile LocalTimeProfile::coarsen(std::size_t factor) const {
  require(factor >= 1, ErrorCode::Domain, "coarsening factor must be >= 1");
  LocalTimeProfile out;
  out.bandwidth = bandwidth * static_cast<double>(factor);
  out.L0 = L0;
  out.masses.assign((masses.size() + factor - 1) / factor, 0.0);
  for (std::size_t j = 0; j < masses.size(); ++j) out.masses[j / factor] += masses[j];
  for (double& m : out.masses) m /= static_cast<double>(factor);
  return out;
}

GridPath sample_path(PathKind kind, double start, std::optional<double> end, double T,
                     std::size_t n_steps, RngStream& s) {
  require(n_steps > 0, ErrorCode::Domain, "n_steps must be positive");
  require(T > 0 && std::isfinite(T), ErrorCode::Domain, "T must be positive");
  require(kind == PathKind::BrownianMotion || end.has_value(), ErrorCode::Usage,
          "bridge requires an end point");
  GridPath p{T / static_cast<double>(n_steps), std::vector<double>(n_steps + 1)};
  const double sd = std::sqrt(p.dt);
  double w = 0.0;
  p.values[0] = 0.0;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    w += sd * sample_std_normal(s);
    p.values[i] = w;
  }
  if (kind == PathKind::BrownianMotion) {
    for (double& v : p.values) v += start;
    return p;
  }
  const double pull = w - (*end - start);
  const double inv_n = 1.0 / static_cast<double>(n_steps);
  for (std::size_t i = 0; i <= n_steps; ++i)
    p.values[i] = start + p.values[i] - static_cast<double>(i) * inv_n * pull;
  p.values[0] = start;
  p.values[n_steps] = *end;
  return p;
}

ReflectedPath reflect_with_local_time(const GridPath& p) {
  ReflectedPath out{p, 0.0};
  double defect = 0.0;
  for (double& v : out.path.values) {
    defect = std::max(defect, -v);
    v += defect;
  }
  out.L0 = 2.0 * defect;
  return out;
}

double segment_local_time(double a, double b, double dt, RngStream& s) {
  const double abs_a = std::fabs(a), abs_b = std::fabs(b);
  const bool same_side = a * b > 0.0;
  if (same_side) {
    const double exponent = 2.0 * abs_a * abs_b / dt;
    if (exponent > 40.0) return 0.0;  // touch probability below 5e-18
    const double u = s.uniform();
    const double p_hit = std::exp(-exponent);
    if (u >= p_hit) return 0.0;
    const double sh = (abs_a + abs_b) / std::sqrt(dt);
    const double z = std::sqrt(sh * sh - 2.0 * std::log(u / p_hit)) - sh;
    return std::sqrt(dt) * z;
  }
  const double sh = (abs_a + abs_b) / std::sqrt(dt);
  const double z = std::sqrt(sh * sh - 2.0 * std::log(s.uniform())) - sh;
  return std::sqrt(dt) * z;
}

double sample_path_minimum(const GridPath& p, RngStream& s) {
  require(!p.values.empty(), ErrorCode::Domain, "empty path");
  const auto& v = p.values;
  double best = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double a = v[i - 1], b = v[i];
    const double d = a - b;
    const double m = 0.5 * (a + b - std::sqrt(d * d - 2.0 * p.dt * std::log(s.uniform())));
    best = std::min(best, m);
  }
  return best;
}

AbsolutePath absolute_with_local_time(const GridPath& signed_path, RngStream& s) {
  AbsolutePath out;
  out.path.dt = signed_path.dt;
  out.path.values.resize(signed_path.values.size());
  double lt = 0.0;
  const auto& v = signed_path.values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.path.values[i] = std::fabs(v[i]);
    if (i > 0) {
      const double seg = segment_local_time(v[i - 1], v[i], signed_path.dt, s);
      if (seg > 0.0 || v[i - 1] * v[i] <= 0.0) out.touched = true;
      lt += seg;
    }
  }
  out.L0 = 2.0 * lt;
  return out;
}

AbsolutePath sample_reflected_bridge_with_local_time(double T, std::size_t n_steps, RngStream& s) {
  const GridPath b = sample_path(PathKind::Bridge, 0.0, 0.0, T, n_steps, s);
  return absolute_with_local_time(b, s);
}

GridPath sample_reflected_bridge(double T, std::size_t n_steps, RngStream& s) {
  GridPath b = sample_path(PathKind::Bridge, 0.0, 0.0, T, n_steps, s);
  for (double& v : b.values) v = std::fabs(v);
  return b;
}

LocalTimeProfile local_time_profile(const GridPath& p, double bandwidth) {
  require(bandwidth > 0 && std::isfinite(bandwidth), ErrorCode::Domain, "bandwidth must be positive");
  require(!p.values.empty(), ErrorCode::Domain, "empty path");
  const double top = *std::max_element(p.values.begin(), p.values.end());
  const double bottom = *std::min_element(p.values.begin(), p.values.end());
  require(bottom >= 0.0, ErrorCode::Domain, "local-time profile needs a nonnegative path");
  LocalTimeProfile prof;
  prof.bandwidth = bandwidth;
  const double inv = 1.0 / bandwidth;
  prof.masses.assign(static_cast<std::size_t>(top * inv) + 2, 0.0);
  double* m = prof.masses.data();
  const double dt = p.dt;
  for (std::size_t i = 1; i < p.values.size(); ++i) {
    double lo = p.values[i - 1], hi = p.values[i];
    if (lo > hi) std::swap(lo, hi);
    const auto jlo = static_cast<std::size_t>(lo * inv);
    const auto jhi = static_cast<std::size_t>(hi * inv);
    if (jlo == jhi) {
      m[jlo] += dt;
      continue;
    }
    const double rate = dt / (hi - lo);
    m[jlo] += rate * (static_cast<double>(jlo + 1) * bandwidth - lo);
    for (std::size_t j = jlo + 1; j < jhi; ++j) m[j] += rate * bandwidth;
    m[jhi] += rate * (hi - static_cast<double>(jhi) * bandwidth);
  }
  for (double& x : prof.masses) x *= inv;
  while (prof.masses.size() > 1 && prof.masses.back() == 0.0) prof.masses.pop_back();
  return prof;
}

double time_integral(const GridPath& p) {
  const auto& v = p.values;
  if (v.size() < 2) return 0.0;
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
  return acc * p.dt;
}

BesselBridge sample_bessel3_bridge(double alpha_half, std::size_t n_steps, RngStream& s,
                                   BesselMethod method) {
  require(alpha_half >= 0 && std::isfinite(alpha_half), ErrorCode::Domain,
          "alpha_half must be nonnegative");
  require(n_steps >= 2, ErrorCode::Domain, "n_steps must be >= 2");
  const double dt = 1.0 / static_cast<double>(n_steps);
  const double sd = std::sqrt(dt);
  BesselBridge out;
  out.b.dt = dt;
  out.b.values.resize(n_steps + 1);
  if (method == BesselMethod::Modulus) {
    // Each coordinate: c (1 - t) + W_t - t W_1.
    std::vector<double> w[3];
    for (auto& wc : w) {
      wc.resize(n_steps + 1);
      wc[0] = 0.0;
      for (std::size_t i = 1; i <= n_steps; ++i) wc[i] = wc[i - 1] + sd * sample_std_normal(s);
    }
    for (std::size_t i = 0; i <= n_steps; ++i) {
      const double t = static_cast<double>(i) * dt;
      const double x = alpha_half * (1.0 - t) + w[0][i] - t * w[0][n_steps];
      const double y = w[1][i] - t * w[1][n_steps];
      const double z = w[2][i] - t * w[2][n_steps];
      out.b.values[i] = std::sqrt(x * x + y * y + z * z);
    }
    out.b.values[0] = alpha_half;
    out.b.values[n_steps] = 0.0;
    return out;
  }
  require(alpha_half > 0, ErrorCode::Usage, "the SDE route needs a positive starting point");
  GridPath drive{dt, std::vector<double>(n_steps + 1, 0.0)};
  double b = alpha_half;
  out.b.values[0] = b;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double dw = sd * sample_std_normal(s);
    drive.values[i + 1] = drive.values[i] + dw;
    if (i + 1 < n_steps) {
      // Drift-implicit in the full drift: c b' - dt / b' = b + dw has one
      // positive root, so the floor only guards against underflow. Explicit
      // Euler hits the floor and then overshoots by dt / floor.
      const double c = 1.0 + dt / (1.0 - t - dt);
      const double rhs = b + dw;
      b = (rhs + std::sqrt(rhs * rhs + 4.0 * c * dt)) / (2.0 * c);
      b = std::max(b, kBesselFloor);
      out.b.values[i + 1] = b;
    }
  }
  out.b.values[n_steps] = 0.0;
  out.driving = std::move(drive);
  return out;
}

double bessel_inverse_integral(const GridPath& b) {
  const std::size_t n = b.n_steps();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * b.dt;
    const double f = (1.0 - t) / std::max(b.values[i], kBesselFloor);
    acc += (i == 0 ? 0.5 : 1.0) * f;
  }
  return acc * b.dt;  // the t = 1 endpoint contributes 0
}

double functional_A(const GridPath& r, const LocalTimeProfile& profile) {
  require(std::fabs(r.horizon() - 1.0) <= 1e-9, ErrorCode::Domain, "functional A needs horizon 1");
  const auto nonzero = std::count_if(profile.masses.begin(), profile.masses.end(),
                                     [](double m) { return m > 0.0; });
  require(nonzero >= 2, ErrorCode::Domain,
          "degenerate path: occupation confined to a single bin");
  return std::sqrt(12.0) * (time_integral(r) - 0.5 * profile.squared_integral());
}

double sample_A_mixture(RngStream& s) {
  const double z = sample_std_normal(s);
  const double l0 = sample_local_time_zero_bridge(s);
  return z - std::sqrt(3.0) / 2.0 * l0;
}

}  // namespace airy
